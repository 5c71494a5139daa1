#include "kanbench/serialize.hpp"

#include <fstream>
#include <sstream>

#include "kanbench/error.hpp"

namespace kanbench {

using nlohmann::json;

namespace {

void expect_kind(const json& doc, std::string_view kind) {
    if (!doc.is_object() || !doc.contains("kind") || doc.at("kind").get<std::string>() != kind) {
        throw Error(ErrorCode::invalid_config, "expected a model document of kind '" + std::string(kind) + "'");
    }
}

template <class Fn>
auto guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, std::string("malformed model document: ") + e.what());
    }
}

}  // namespace

json to_json(const KanNetwork& net) {
    json domains = json::array();
    json coefficients = json::array();
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        json layer_domains = json::array();
        for (const Interval& d : net.domains(l)) layer_domains.push_back({d.lo, d.hi});
        domains.push_back(std::move(layer_domains));
        json layer = json::array();
        for (std::size_t j = 0; j < net.layer_sizes()[l + 1]; ++j) {
            json row = json::array();
            for (std::size_t i = 0; i < net.layer_sizes()[l]; ++i) {
                auto c = net.edge_coeffs(l, j, i);
                row.push_back(std::vector<double>(c.begin(), c.end()));
            }
            layer.push_back(std::move(row));
        }
        coefficients.push_back(std::move(layer));
    }
    return {{"kind", "kan"},         {"format_version", kModelFormatVersion},
            {"layer_sizes", net.layer_sizes()}, {"grid", net.grid()},
            {"degree", net.degree()}, {"seed", net.seed()},
            {"domains", domains},    {"coefficients", coefficients}};
}

json to_json(const MlpNetwork& net) {
    json layers = json::array();
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        json weights = json::array();
        std::vector<double> bias;
        for (std::size_t o = 0; o < net.layer_sizes()[l + 1]; ++o) {
            std::vector<double> row;
            for (std::size_t i = 0; i < net.layer_sizes()[l]; ++i) row.push_back(net.weight(l, o, i));
            weights.push_back(row);
            bias.push_back(net.bias(l, o));
        }
        layers.push_back({{"weights", weights}, {"bias", bias}});
    }
    std::vector<std::string> acts;
    for (Activation a : net.activations()) acts.emplace_back(to_string(a));
    return {{"kind", "mlp"},       {"format_version", kModelFormatVersion}, {"layer_sizes", net.layer_sizes()},
            {"activations", acts}, {"seed", net.seed()},                    {"layers", layers}};
}

json to_json(const SymbolicNetwork& snet) {
    json edges = json::array();
    for (std::size_t l = 0; l < snet.layer_count(); ++l) {
        for (std::size_t j = 0; j < snet.layer_sizes[l + 1]; ++j) {
            for (std::size_t i = 0; i < snet.layer_sizes[l]; ++i) {
                const AffineFit& e = snet.edge(l, j, i);
                edges.push_back({{"layer", l},
                                 {"out", j},
                                 {"in", i},
                                 {"candidate", std::string(to_string(e.candidate))},
                                 {"a", e.a},
                                 {"b", e.b},
                                 {"c", e.c},
                                 {"d", e.d},
                                 {"r2", e.r2},
                                 {"max_abs_residual", e.max_abs_residual}});
            }
        }
    }
    json audit = json::array();
    for (const EdgeAudit& a : snet.audit) {
        json r2 = json::object();
        for (std::size_t q = 0; q < kCandidateCount; ++q) r2[std::string(to_string(kCandidates[q]))] = a.r2[q];
        audit.push_back({{"layer", a.layer}, {"out", a.out}, {"in", a.in}, {"samples", a.samples}, {"r2", r2}});
    }
    return {{"kind", "symbolic_kan"}, {"format_version", kModelFormatVersion}, {"layer_sizes", snet.layer_sizes},
            {"edges", edges},         {"audit", audit}};
}

json to_json(const CostReport& cost) {
    return {{"adds", cost.adds},
            {"muls", cost.muls},
            {"divs", cost.divs},
            {"transcendental_calls", cost.transcendental_calls},
            {"comparisons", cost.comparisons},
            {"constant_memory_words", cost.constant_memory_words},
            {"weighted_dsp_equiv", cost.weighted_dsp_equiv()},
            {"weights", {{"mul", kMulWeight}, {"div", kDivWeight}, {"transcendental", kTranscendentalWeight}}}};
}

json to_json(const TrainConfig& config) {
    return {{"epochs", config.epochs},
            {"learning_rate", config.learning_rate},
            {"optimizer", std::string(to_string(config.optimizer))},
            {"loss", std::string(to_string(config.loss))},
            {"seed", config.seed},
            {"batch_size", config.batch_size},
            {"lbfgs_history", config.lbfgs_history},
            {"lbfgs_tolerance", config.lbfgs_tolerance}};
}

json summary_json(const TrainReport& report, const TrainConfig& config) {
    return {{"epochs_run", report.epochs_run},
            {"initial_loss", report.initial_loss},
            {"final_loss", report.losses.empty() ? report.initial_loss : report.losses.back()},
            {"train_accuracy", report.train_accuracy},
            {"test_accuracy", report.test_accuracy},
            {"accuracy_split", "held-out test partition"},
            {"seconds", report.seconds},
            {"stop_reason", report.stop_reason},
            {"config", to_json(config)}};
}

KanNetwork kan_from_json(const json& doc) {
    expect_kind(doc, "kan");
    return guarded([&] {
        const auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
        const int grid = doc.at("grid").get<int>();
        const int degree = doc.at("degree").get<int>();
        const auto& domains = doc.at("domains");
        std::vector<Interval> input_domains;
        for (const auto& d : domains.at(0)) input_domains.push_back({d.at(0).get<double>(), d.at(1).get<double>()});
        KanNetwork net(sizes, grid, degree, input_domains);
        net.set_seed(doc.value("seed", std::uint64_t{0}));
        for (std::size_t l = 1; l < net.layer_count(); ++l) {
            for (std::size_t i = 0; i < sizes[l]; ++i) {
                const auto& d = domains.at(l).at(i);
                net.set_domain(l, i, {d.at(0).get<double>(), d.at(1).get<double>()});
            }
        }
        const auto& coeffs = doc.at("coefficients");
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            for (std::size_t j = 0; j < sizes[l + 1]; ++j) {
                for (std::size_t i = 0; i < sizes[l]; ++i) {
                    const auto values = coeffs.at(l).at(j).at(i).get<std::vector<double>>();
                    if (values.size() != net.coeffs_per_edge()) {
                        throw Error(ErrorCode::invalid_shape, "edge coefficient count must equal grid + degree");
                    }
                    std::copy(values.begin(), values.end(), net.edge_coeffs(l, j, i).begin());
                }
            }
        }
        return net;
    });
}

MlpNetwork mlp_from_json(const json& doc) {
    expect_kind(doc, "mlp");
    return guarded([&] {
        const auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
        std::vector<Activation> acts;
        for (const auto& a : doc.at("activations")) acts.push_back(activation_from_string(a.get<std::string>()));
        MlpNetwork net(sizes, acts);
        net.set_seed(doc.value("seed", std::uint64_t{0}));
        const auto& layers = doc.at("layers");
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            const auto& layer = layers.at(l);
            for (std::size_t o = 0; o < sizes[l + 1]; ++o) {
                const auto row = layer.at("weights").at(o).get<std::vector<double>>();
                if (row.size() != sizes[l]) throw Error(ErrorCode::invalid_shape, "weight row width mismatch");
                for (std::size_t i = 0; i < sizes[l]; ++i) net.weight(l, o, i) = row[i];
                net.bias(l, o) = layer.at("bias").at(o).get<double>();
            }
        }
        return net;
    });
}

SymbolicNetwork symbolic_from_json(const json& doc) {
    expect_kind(doc, "symbolic_kan");
    return guarded([&] {
        SymbolicNetwork snet;
        snet.layer_sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
        validate_layer_sizes(snet.layer_sizes);
        snet.edges.resize(snet.layer_sizes.size() - 1);
        for (std::size_t l = 0; l + 1 < snet.layer_sizes.size(); ++l) {
            snet.edges[l].resize(snet.layer_sizes[l] * snet.layer_sizes[l + 1]);
        }
        std::size_t seen = 0;
        for (const auto& e : doc.at("edges")) {
            AffineFit fit;
            fit.candidate = candidate_from_string(e.at("candidate").get<std::string>());
            fit.a = e.at("a").get<double>();
            fit.b = e.at("b").get<double>();
            fit.c = e.at("c").get<double>();
            fit.d = e.at("d").get<double>();
            fit.r2 = e.value("r2", 0.0);
            fit.max_abs_residual = e.value("max_abs_residual", 0.0);
            snet.edges.at(e.at("layer").get<std::size_t>())
                .at(e.at("out").get<std::size_t>() * snet.layer_sizes[e.at("layer").get<std::size_t>()] +
                    e.at("in").get<std::size_t>()) = fit;
            ++seen;
        }
        std::size_t expected = 0;
        for (const auto& layer : snet.edges) expected += layer.size();
        if (seen != expected) throw Error(ErrorCode::invalid_shape, "symbolic document must list every edge once");
        if (doc.contains("audit")) {
            for (const auto& a : doc.at("audit")) {
                EdgeAudit audit{a.at("layer").get<std::size_t>(), a.at("out").get<std::size_t>(),
                                a.at("in").get<std::size_t>(), a.at("samples").get<std::size_t>(), {}};
                for (std::size_t q = 0; q < kCandidateCount; ++q) {
                    audit.r2[q] = a.at("r2").at(std::string(to_string(kCandidates[q]))).get<double>();
                }
                snet.audit.push_back(audit);
            }
        }
        return snet;
    });
}

AnyModel model_from_json(const json& doc) {
    const std::string kind = doc.is_object() ? doc.value("kind", std::string{}) : std::string{};
    if (kind == "mlp") return mlp_from_json(doc);
    if (kind == "kan") return kan_from_json(doc);
    if (kind == "symbolic_kan") return symbolic_from_json(doc);
    throw Error(ErrorCode::invalid_config, "unknown model kind '" + kind + "'");
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_config, path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace kanbench
