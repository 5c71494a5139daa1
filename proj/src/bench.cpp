#include "kanbench/bench.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "kanbench/error.hpp"
#include "kanbench/serialize.hpp"

namespace kanbench {

using nlohmann::json;

namespace {

ColumnRef parse_column(const json& j) {
    if (j.is_number_unsigned() || j.is_number_integer()) return j.get<std::size_t>();
    return j.get<std::string>();
}

TrainConfig parse_train(const json& j, TrainConfig defaults) {
    if (j.contains("epochs")) defaults.epochs = j.at("epochs").get<std::size_t>();
    if (j.contains("learning_rate")) defaults.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("optimizer")) defaults.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    if (j.contains("loss")) defaults.loss = loss_from_string(j.at("loss").get<std::string>());
    if (j.contains("batch_size")) defaults.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("lbfgs_history")) defaults.lbfgs_history = j.at("lbfgs_history").get<std::size_t>();
    if (j.contains("lbfgs_tolerance")) defaults.lbfgs_tolerance = j.at("lbfgs_tolerance").get<double>();
    return defaults;
}

DatasetEntry parse_entry(const json& j, const std::filesystem::path& base_dir) {
    DatasetEntry e;
    e.name = j.at("name").get<std::string>();
    const json& src = j.at("source");
    const std::string type = src.at("type").get<std::string>();
    if (type == "moons") {
        e.source.kind = DatasetSource::Kind::moons;
        e.source.samples = src.value("samples", std::size_t{10000});
        e.source.noise = src.value("noise", 0.2);
    } else if (type == "csv") {
        e.source.kind = DatasetSource::Kind::csv;
        std::filesystem::path p = src.at("path").get<std::string>();
        e.source.path = p.is_absolute() ? p : (base_dir / p).lexically_normal();
        const json schema = src.value("schema", json::object());
        e.source.schema.label_column = parse_column(schema.value("label_column", json(0)));
        for (const auto& c : schema.value("categorical_columns", json::array())) {
            e.source.schema.categorical_columns.push_back(parse_column(c));
        }
        for (const auto& c : schema.value("feature_columns", json::array())) {
            e.source.schema.feature_columns.push_back(parse_column(c));
        }
        const std::string delim = schema.value("delimiter", std::string(","));
        if (delim.size() != 1) throw Error(ErrorCode::invalid_config, "delimiter must be one character");
        e.source.schema.delimiter = delim[0];
        e.source.schema.has_header = schema.value("has_header", true);
    } else {
        throw Error(ErrorCode::invalid_config, "unknown dataset source type '" + type + "'");
    }
    e.smote = j.value("smote", false);
    e.smote_neighbors = j.value("smote_neighbors", std::size_t{5});
    e.test_fraction = j.value("test_fraction", 0.2);

    const json& mlp = j.at("mlp");
    e.mlp.layer_sizes = mlp.at("layer_sizes").get<std::vector<std::size_t>>();
    for (const auto& a : mlp.at("activations")) e.mlp.activations.push_back(activation_from_string(a.get<std::string>()));
    TrainConfig mlp_defaults;
    mlp_defaults.optimizer = OptimizerKind::adam;
    e.mlp.train = parse_train(mlp.value("train", json::object()), mlp_defaults);

    const json& kan = j.at("kan");
    e.kan.layer_sizes = kan.at("layer_sizes").get<std::vector<std::size_t>>();
    e.kan.grid = kan.at("grid").get<int>();
    e.kan.degree = kan.at("degree").get<int>();
    TrainConfig kan_defaults;
    kan_defaults.optimizer = OptimizerKind::lbfgs;
    kan_defaults.batch_size = 0;
    e.kan.train = parse_train(kan.value("train", json::object()), kan_defaults);
    return e;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string accuracy(double v) { return fmt("%.4f", v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string source_info(const DatasetEntry& e) {
    if (e.source.kind == DatasetSource::Kind::moons) {
        return "moons(samples=" + std::to_string(e.source.samples) + "; noise=" + fmt("%g", e.source.noise) + ")";
    }
    return "csv(" + e.source.path.filename().string() + ")";
}

template <class Fn>
double timed(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string join_sizes(const std::vector<std::size_t>& sizes) {
    std::string s;
    for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
    return s;
}

BenchConfig parse_bench_config(const json& doc, const std::filesystem::path& base_dir) {
    try {
        BenchConfig config;
        config.seed = doc.value("seed", std::uint64_t{42});
        const std::filesystem::path out = doc.value("output_dir", std::string("out"));
        config.output_dir = out.is_absolute() ? out : (base_dir / out).lexically_normal();
        for (const auto& entry : doc.at("datasets")) config.datasets.push_back(parse_entry(entry, base_dir));
        return config;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed benchmark config: ") + e.what());
    }
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
    return parse_bench_config(read_json_file(path), std::filesystem::absolute(path).parent_path());
}

void select_datasets(BenchConfig& config, const std::vector<std::string>& names) {
    if (names.empty()) return;
    for (const auto& n : names) find_dataset(config, n);
    std::vector<DatasetEntry> kept;
    for (auto& e : config.datasets) {
        if (std::find(names.begin(), names.end(), e.name) != names.end()) kept.push_back(e);
    }
    config.datasets = std::move(kept);
}

const DatasetEntry& find_dataset(const BenchConfig& config, const std::string& name) {
    for (const auto& e : config.datasets) {
        if (e.name == name) return e;
    }
    throw Error(ErrorCode::invalid_config, "no dataset named '" + name + "' in config");
}

std::uint64_t row_seed(const BenchConfig& config, std::size_t index) { return config.seed + index; }

PreparedData prepare_dataset(const DatasetEntry& entry, std::uint64_t seed) {
    Dataset raw;
    if (entry.source.kind == DatasetSource::Kind::moons) {
        raw = make_moons(entry.source.samples, entry.source.noise, seed);
    } else {
        if (!std::filesystem::exists(entry.source.path)) {
            throw Error(ErrorCode::dataset_unresolvable, "dataset file not found: " + entry.source.path.string());
        }
        raw = load_csv(entry.source.path, entry.source.schema);
    }
    PreparedData p;
    p.raw_samples = raw.size();
    if (entry.smote) raw = smote(raw, entry.smote_neighbors, seed);
    p.samples = raw.size();
    auto [train, test] = split_stratified(raw, entry.test_fraction, seed);
    Standardized s = standardize(train, test);
    p.train = std::move(s.train);
    p.test = std::move(s.test);
    return p;
}

DatasetResult run_dataset(const DatasetEntry& entry, std::uint64_t seed) {
    DatasetResult r;
    r.name = entry.name;
    r.source_info = source_info(entry);
    try {
        const PreparedData data = prepare_dataset(entry, seed);
        r.raw_samples = data.raw_samples;
        r.samples = data.samples;
        r.train_samples = data.train.size();
        r.test_samples = data.test.size();

        // MLP with Adam.
        r.mlp_train = entry.mlp.train;
        r.mlp_train.seed = seed;
        MlpNetwork mlp = mlp_init(entry.mlp.layer_sizes, entry.mlp.activations, seed);
        auto [mlp_trained, mlp_report] = train(std::move(mlp), data.train, r.mlp_train, &data.test);
        ModelRow mrow;
        mrow.dataset = entry.name;
        mrow.model = "MLP";
        mrow.model_size = join_sizes(entry.mlp.layer_sizes);
        mrow.spline_info = "N/A";
        mrow.params = mlp_param_count(entry.mlp.layer_sizes);
        mrow.pre_accuracy = mlp_report.test_accuracy;
        mrow.epochs_run = mlp_report.epochs_run;
        mrow.final_loss = mlp_report.losses.empty() ? mlp_report.initial_loss : mlp_report.losses.back();
        mrow.stop_reason = mlp_report.stop_reason;
        mrow.cost = cost_report(mlp_trained);
        mrow.artifact_stem = entry.name + "_mlp";
        mrow.train_seconds = mlp_report.seconds;
        mrow.inference_seconds = timed([&] { (void)mlp_predict(mlp_trained, data.test.features); });
        r.mlp_source = emit_inference_source(mlp_trained, entry.name + "_mlp_infer");

        // KAN with L-BFGS, then symbolification.
        r.kan_train = entry.kan.train;
        r.kan_train.seed = seed;
        KanNetwork kan = kan_init(entry.kan.layer_sizes, entry.kan.grid, entry.kan.degree, seed,
                                  input_domains_from_data(data.train.features));
        auto [kan_trained, kan_report] = train(std::move(kan), data.train, r.kan_train, &data.test);
        const SymbolicNetwork snet =
            symbolify_network(kan_trained, collect_edge_samples(kan_trained, data.train.features));
        const DecisionRule rule = default_rule(kan_trained.outputs());
        Matrix symbolic_out;
        const double symbolic_seconds = timed([&] { symbolic_out = symbolic_eval(snet, data.test.features); });
        ModelRow krow;
        krow.dataset = entry.name;
        krow.model = "KAN";
        krow.model_size = join_sizes(entry.kan.layer_sizes);
        krow.spline_info = "G=" + std::to_string(entry.kan.grid) + "/k=" + std::to_string(entry.kan.degree);
        krow.params = kan_param_count(entry.kan.layer_sizes, entry.kan.grid, entry.kan.degree);
        krow.pre_accuracy = kan_report.test_accuracy;
        krow.post_accuracy = accuracy_from_outputs(symbolic_out, data.test.labels, rule);
        krow.epochs_run = kan_report.epochs_run;
        krow.final_loss = kan_report.losses.empty() ? kan_report.initial_loss : kan_report.losses.back();
        krow.stop_reason = kan_report.stop_reason;
        krow.cost = cost_report(snet);
        krow.artifact_stem = entry.name + "_kan_symbolic";
        krow.train_seconds = kan_report.seconds;
        krow.inference_seconds = timed([&] { (void)kan_predict(kan_trained, data.test.features); });
        krow.symbolic_inference_seconds = symbolic_seconds;
        r.symbolic_source = emit_inference_source(snet, entry.name + "_kan_symbolic_infer");
        r.formulas = formula_dump(snet);

        r.rows = {std::move(mrow), std::move(krow)};
        r.mlp = std::move(mlp_trained);
        r.kan = std::move(kan_trained);
        r.symbolic = snet;
        r.mlp_report = std::move(mlp_report);
        r.kan_report = std::move(kan_report);
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
        r.rows.clear();
    }
    return r;
}

bool BenchReport::all_completed() const {
    return std::all_of(datasets.begin(), datasets.end(), [](const DatasetResult& d) { return d.ok; });
}

BenchReport run_benchmark(const BenchConfig& config, const std::function<void(const DatasetResult&)>& on_row) {
    BenchReport report;
    for (std::size_t i = 0; i < config.datasets.size(); ++i) {
        DatasetResult r = run_dataset(config.datasets[i], row_seed(config, i));
        if (on_row) on_row(r);
        report.datasets.push_back(std::move(r));
    }
    return report;
}

namespace {

const char* kCsvHeader =
    "dataset,source,model,model_size,spline_info,params,pre_accuracy,post_accuracy,post_minus_pre,samples_raw,"
    "samples,train_samples,test_samples,epochs_run,final_loss,stop_reason,adds,muls,divs,transcendental_calls,"
    "comparisons,constant_memory_words,weighted_dsp_equiv,status\n";

std::string post_delta(const ModelRow& row) {
    return row.post_accuracy ? fmt("%+.4f", *row.post_accuracy - row.pre_accuracy) : "";
}

}  // namespace

std::string report_csv(const BenchReport& report) {
    std::ostringstream out;
    out << kCsvHeader;
    for (const auto& d : report.datasets) {
        if (!d.ok) {
            out << csv_field(d.name) << "," << csv_field(d.source_info) << ",,,,,,,,,,,,,,,,,,,,,,"
                << csv_field("error: " + d.error) << "\n";
            continue;
        }
        for (const auto& row : d.rows) {
            out << csv_field(row.dataset) << "," << csv_field(d.source_info) << "," << row.model << ","
                << csv_field(row.model_size) << "," << row.spline_info << "," << row.params << ","
                << accuracy(row.pre_accuracy) << "," << (row.post_accuracy ? accuracy(*row.post_accuracy) : "") << ","
                << post_delta(row) << "," << d.raw_samples << "," << d.samples << "," << d.train_samples << ","
                << d.test_samples << "," << row.epochs_run << "," << fmt("%.17g", row.final_loss) << ","
                << row.stop_reason << "," << row.cost.adds << "," << row.cost.muls << "," << row.cost.divs << ","
                << row.cost.transcendental_calls << "," << row.cost.comparisons << ","
                << row.cost.constant_memory_words << "," << fmt("%g", row.cost.weighted_dsp_equiv()) << ",ok\n";
        }
    }
    return out.str();
}

std::string report_markdown(const BenchReport& report) {
    std::ostringstream out;
    out << "# MLP vs KAN benchmark\n\n"
        << "Accuracy is measured on the held-out stratified test partition. "
        << "Pre: KAN before symbolification; Post: KAN after symbolification.\n\n"
        << "| Dataset | Type | Model Size | Spline Info | No. Params | Pre Accuracy | Post Accuracy |\n"
        << "|---|---|---|---|---|---|---|\n";
    for (const auto& d : report.datasets) {
        for (const auto& row : d.rows) {
            out << "| " << row.dataset << " | " << row.model << " | " << row.model_size << " | " << row.spline_info
                << " | " << row.params << " | " << accuracy(row.pre_accuracy) << " | "
                << (row.post_accuracy ? accuracy(*row.post_accuracy) : accuracy(row.pre_accuracy)) << " |\n";
        }
    }
    out << "\n## Symbolification degradation\n\n| Dataset | Pre | Post | Post - Pre |\n|---|---|---|---|\n";
    for (const auto& d : report.datasets) {
        for (const auto& row : d.rows) {
            if (!row.post_accuracy) continue;
            out << "| " << row.dataset << " | " << accuracy(row.pre_accuracy) << " | " << accuracy(*row.post_accuracy)
                << " | " << post_delta(row) << " |\n";
        }
    }
    out << "\n## Static inference cost (one sample)\n\n"
        << "DSP-equivalent = muls + 4 x divs + 8 x transcendental calls.\n\n"
        << "| Dataset | Model | Adds | Muls | Divs | Transcendental | Comparisons | Constants | DSP-equivalent |\n"
        << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& d : report.datasets) {
        for (const auto& row : d.rows) {
            out << "| " << row.dataset << " | " << (row.model == "KAN" ? "KAN (symbolic)" : row.model) << " | "
                << row.cost.adds << " | " << row.cost.muls << " | " << row.cost.divs << " | "
                << row.cost.transcendental_calls << " | " << row.cost.comparisons << " | "
                << row.cost.constant_memory_words << " | " << fmt("%g", row.cost.weighted_dsp_equiv()) << " |\n";
        }
    }
    bool any_error = false;
    for (const auto& d : report.datasets) any_error = any_error || !d.ok;
    if (any_error) {
        out << "\n## Rows not completed\n\n";
        for (const auto& d : report.datasets) {
            if (!d.ok) out << "- " << d.name << ": " << d.error << "\n";
        }
    }
    return out.str();
}

std::string times_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "dataset,model,train_seconds,test_inference_seconds,symbolic_test_inference_seconds,epochs_run\n";
    for (const auto& d : report.datasets) {
        for (const auto& row : d.rows) {
            out << csv_field(row.dataset) << "," << row.model << "," << fmt("%.6f", row.train_seconds) << ","
                << fmt("%.6f", row.inference_seconds) << ","
                << (row.symbolic_inference_seconds ? fmt("%.6f", *row.symbolic_inference_seconds) : "") << ","
                << row.epochs_run << "\n";
        }
    }
    return out.str();
}

std::string loss_csv(const TrainReport& report) {
    std::ostringstream out;
    out << "epoch,loss\n";
    for (std::size_t e = 0; e < report.losses.size(); ++e) out << (e + 1) << "," << fmt("%.17g", report.losses[e]) << "\n";
    return out.str();
}

void emit_dataset_artifacts(const DatasetResult& r, const std::filesystem::path& out_dir) {
    if (!r.ok) return;
    const std::string& n = r.name;
    write_text_file(out_dir / ("loss_" + n + "_mlp.csv"), loss_csv(r.mlp_report));
    write_text_file(out_dir / ("loss_" + n + "_kan.csv"), loss_csv(r.kan_report));
    write_json_file(out_dir / (n + "_mlp.model.json"), to_json(*r.mlp));
    write_json_file(out_dir / (n + "_kan.model.json"), to_json(*r.kan));
    write_json_file(out_dir / (n + "_kan_symbolic.model.json"), to_json(*r.symbolic));
    write_json_file(out_dir / (n + "_mlp.train.json"), summary_json(r.mlp_report, r.mlp_train));
    write_json_file(out_dir / (n + "_kan.train.json"), summary_json(r.kan_report, r.kan_train));
    write_text_file(out_dir / (n + "_mlp.inference.c99.txt"), r.mlp_source);
    write_text_file(out_dir / (n + "_kan_symbolic.inference.c99.txt"), r.symbolic_source);
    write_json_file(out_dir / (n + "_mlp.cost.json"), to_json(r.rows.at(0).cost));
    write_json_file(out_dir / (n + "_kan_symbolic.cost.json"), to_json(r.rows.at(1).cost));
    write_text_file(out_dir / ("formulas_" + n + ".txt"), r.formulas);
}

void emit_report(const BenchReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const auto& d : report.datasets) emit_dataset_artifacts(d, out_dir);
    write_text_file(out_dir / "report.csv", report_csv(report));
    write_text_file(out_dir / "report.md", report_markdown(report));
    write_text_file(out_dir / "times.csv", times_csv(report));
}

}  // namespace kanbench
