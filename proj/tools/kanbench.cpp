// kanbench command-line driver.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kanbench/bench.hpp"
#include "kanbench/error.hpp"
#include "kanbench/serialize.hpp"

namespace {

using namespace kanbench;

struct Options {
    std::string config = "config/default_bench.json";
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> datasets;
    std::string model = "kan";
    std::string model_file;
};

BenchConfig load(const Options& opt) {
    BenchConfig config = load_bench_config(opt.config);
    if (opt.seed) config.seed = *opt.seed;
    if (!opt.out.empty()) config.output_dir = opt.out;
    return config;
}

// Resolves the single dataset a stage command works on, together with the
// seed its benchmark row would use.
std::pair<DatasetEntry, std::uint64_t> selected_entry(const BenchConfig& config, const Options& opt) {
    if (opt.datasets.size() != 1) throw Error(ErrorCode::invalid_config, "select exactly one dataset with --datasets");
    for (std::size_t i = 0; i < config.datasets.size(); ++i) {
        if (config.datasets[i].name == opt.datasets[0]) return {config.datasets[i], row_seed(config, i)};
    }
    throw Error(ErrorCode::invalid_config, "no dataset named '" + opt.datasets[0] + "' in config");
}

std::string dataset_csv(const Dataset& d) {
    std::ostringstream out;
    for (std::size_t c = 0; c < d.features.cols(); ++c) {
        out << (c < d.feature_names.size() ? d.feature_names[c] : "x" + std::to_string(c)) << ",";
    }
    out << "label\n";
    char buf[32];
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < d.features.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", d.features(r, c));
            out << buf << ",";
        }
        out << d.labels[r] << "\n";
    }
    return out.str();
}

int cmd_gen_data(const Options& opt) {
    const BenchConfig config = load(opt);
    const auto [entry, seed] = selected_entry(config, opt);
    const PreparedData data = prepare_dataset(entry, seed);
    write_text_file(config.output_dir / (entry.name + "_train.csv"), dataset_csv(data.train));
    write_text_file(config.output_dir / (entry.name + "_test.csv"), dataset_csv(data.test));
    std::cout << entry.name << ": " << data.raw_samples << " raw, " << data.samples << " after resampling, "
              << data.train.size() << " train, " << data.test.size() << " test\n";
    return 0;
}

int cmd_train(const Options& opt) {
    const BenchConfig config = load(opt);
    const auto [entry, seed] = selected_entry(config, opt);
    const PreparedData data = prepare_dataset(entry, seed);
    const std::string stem = entry.name + "_" + opt.model;
    TrainReport report;
    TrainConfig tc;
    if (opt.model == "mlp") {
        tc = entry.mlp.train;
        tc.seed = seed;
        auto [net, rep] = train(mlp_init(entry.mlp.layer_sizes, entry.mlp.activations, seed), data.train, tc, &data.test);
        write_json_file(config.output_dir / (stem + ".model.json"), to_json(net));
        report = std::move(rep);
    } else if (opt.model == "kan") {
        tc = entry.kan.train;
        tc.seed = seed;
        KanNetwork init = kan_init(entry.kan.layer_sizes, entry.kan.grid, entry.kan.degree, seed,
                                   input_domains_from_data(data.train.features));
        auto [net, rep] = train(std::move(init), data.train, tc, &data.test);
        write_json_file(config.output_dir / (stem + ".model.json"), to_json(net));
        report = std::move(rep);
    } else {
        throw Error(ErrorCode::invalid_config, "--model must be mlp or kan");
    }
    write_text_file(config.output_dir / ("loss_" + stem + ".csv"), loss_csv(report));
    write_json_file(config.output_dir / (stem + ".train.json"), summary_json(report, tc));
    std::printf("%s: test accuracy %.4f after %zu epochs (%s)\n", stem.c_str(), report.test_accuracy,
                report.epochs_run, report.stop_reason.c_str());
    return 0;
}

int cmd_eval(const Options& opt) {
    const BenchConfig config = load(opt);
    const auto [entry, seed] = selected_entry(config, opt);
    const PreparedData data = prepare_dataset(entry, seed);
    const AnyModel model = model_from_json(read_json_file(opt.model_file));
    const double acc = std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SymbolicNetwork>) {
                const Matrix out = symbolic_eval(m, data.test.features);
                return accuracy_from_outputs(out, data.test.labels, default_rule(out.cols()));
            } else {
                return evaluate_accuracy(m, data.test, default_rule(m.outputs()));
            }
        },
        model);
    std::printf("%s test accuracy %.4f\n", entry.name.c_str(), acc);
    return 0;
}

int cmd_symbolify(const Options& opt) {
    const BenchConfig config = load(opt);
    const auto [entry, seed] = selected_entry(config, opt);
    const PreparedData data = prepare_dataset(entry, seed);
    const KanNetwork net = kan_from_json(read_json_file(opt.model_file));
    const SymbolicNetwork snet = symbolify_network(net, collect_edge_samples(net, data.train.features));
    write_json_file(config.output_dir / (entry.name + "_kan_symbolic.model.json"), to_json(snet));
    write_text_file(config.output_dir / ("formulas_" + entry.name + ".txt"), formula_dump(snet));
    const Matrix out = symbolic_eval(snet, data.test.features);
    std::printf("%s: pre %.4f post %.4f\n", entry.name.c_str(),
                evaluate_accuracy(net, data.test, default_rule(net.outputs())),
                accuracy_from_outputs(out, data.test.labels, default_rule(out.cols())));
    return 0;
}

int cmd_codegen(const Options& opt) {
    const AnyModel model = model_from_json(read_json_file(opt.model_file));
    std::filesystem::path stem = std::filesystem::path(opt.model_file).filename();
    while (stem.has_extension()) stem = stem.stem();
    const std::filesystem::path out_dir = opt.out.empty() ? std::filesystem::path(".") : std::filesystem::path(opt.out);
    const std::string fn = stem.string() + "_infer";
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KanNetwork>) {
                throw Error(ErrorCode::invalid_config, "codegen needs an MLP or a symbolified KAN");
            } else {
                write_text_file(out_dir / (stem.string() + ".inference.c99.txt"), emit_inference_source(m, fn));
                const CostReport cost = cost_report(m);
                write_json_file(out_dir / (stem.string() + ".cost.json"), to_json(cost));
                std::printf("%s: weighted_dsp_equiv %g\n", stem.string().c_str(), cost.weighted_dsp_equiv());
            }
        },
        model);
    return 0;
}

int cmd_bench(const Options& opt) {
    BenchConfig config = load(opt);
    select_datasets(config, opt.datasets);
    std::filesystem::create_directories(config.output_dir);
    BenchReport partial;
    const BenchReport report = run_benchmark(config, [&](const DatasetResult& r) {
        emit_dataset_artifacts(r, config.output_dir);
        partial.datasets.push_back(r);
        write_text_file(config.output_dir / "report.csv", report_csv(partial));
        if (r.ok) {
            for (const auto& row : r.rows) {
                std::printf("%-10s %-4s params %-5zu pre %.4f", row.dataset.c_str(), row.model.c_str(), row.params,
                            row.pre_accuracy);
                if (row.post_accuracy) std::printf(" post %.4f", *row.post_accuracy);
                std::printf(" (%.1fs)\n", row.train_seconds);
            }
        } else {
            std::printf("%-10s skipped: %s\n", r.name.c_str(), r.error.c_str());
        }
        std::fflush(stdout);
    });
    emit_report(report, config.output_dir);
    return report.all_completed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MLP vs KAN benchmark"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Benchmark config JSON");
        sub->add_option("--seed", opt.seed, "Override the config seed");
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_option("--datasets", opt.datasets, "Dataset names")->delimiter(',');
    };

    auto* gen = app.add_subcommand("gen-data", "Write the prepared train/test split of one dataset");
    add_common(gen);
    auto* tr = app.add_subcommand("train", "Train one model of one dataset");
    add_common(tr);
    tr->add_option("--model", opt.model, "mlp or kan")->check(CLI::IsMember({"mlp", "kan"}));
    auto* ev = app.add_subcommand("eval", "Test accuracy of a saved model");
    add_common(ev);
    ev->add_option("--model-file", opt.model_file)->required();
    auto* sym = app.add_subcommand("symbolify", "Symbolify a saved KAN");
    add_common(sym);
    sym->add_option("--model-file", opt.model_file)->required();
    auto* cg = app.add_subcommand("codegen", "Emit inference source and cost for a saved model");
    cg->add_option("--model-file", opt.model_file)->required();
    cg->add_option("--out", opt.out, "Output directory");
    auto* bench = app.add_subcommand("bench", "Run the full benchmark");
    add_common(bench);

    CLI11_PARSE(app, argc, argv);
    try {
        if (gen->parsed()) return cmd_gen_data(opt);
        if (tr->parsed()) return cmd_train(opt);
        if (ev->parsed()) return cmd_eval(opt);
        if (sym->parsed()) return cmd_symbolify(opt);
        if (cg->parsed()) return cmd_codegen(opt);
        if (bench->parsed()) return cmd_bench(opt);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
