#include "kanbench/codegen.hpp"

#include <cstdio>
#include <sstream>

#include "kanbench/error.hpp"

namespace kanbench {

CostReport& CostReport::operator+=(const CostReport& o) noexcept {
    adds += o.adds;
    muls += o.muls;
    divs += o.divs;
    transcendental_calls += o.transcendental_calls;
    comparisons += o.comparisons;
    constant_memory_words += o.constant_memory_words;
    return *this;
}

CostReport candidate_cost(Candidate c) {
    CostReport r;
    switch (c) {
    case Candidate::constant:
    case Candidate::identity: break;
    case Candidate::square: r.muls = 1; break;
    case Candidate::cube: r.muls = 2; break;
    case Candidate::quartic: r.muls = 3; break;
    case Candidate::reciprocal:
        r.divs = 1;
        r.comparisons = 1;
        break;
    case Candidate::sqrt_abs:
    case Candidate::exp:
    case Candidate::sin:
    case Candidate::cos:
    case Candidate::tanh: r.transcendental_calls = 1; break;
    case Candidate::log_abs:
        r.transcendental_calls = 1;
        r.adds = 1;
        break;
    case Candidate::abs: r.comparisons = 1; break;
    case Candidate::sigmoid:
        r.transcendental_calls = 1;
        r.divs = 1;
        r.adds = 1;
        break;
    case Candidate::gaussian:
        r.transcendental_calls = 1;
        r.muls = 1;
        break;
    }
    return r;
}

CostReport symbolic_edge_cost(Candidate c) {
    CostReport r = candidate_cost(c);
    r.muls += 2;
    r.adds += 2;
    r.constant_memory_words += 4;
    return r;
}

CostReport activation_cost(Activation a, std::size_t width) {
    CostReport r;
    switch (a) {
    case Activation::relu: r.comparisons = width; break;
    case Activation::sigmoid:
        r.transcendental_calls = width;
        r.divs = width;
        r.adds = width;
        break;
    case Activation::softmax:
        // max search, shift, exponentials, normaliser sum, divisions
        r.comparisons = width - 1;
        r.adds = width + (width - 1);
        r.transcendental_calls = width;
        r.divs = width;
        break;
    case Activation::linear: break;
    }
    return r;
}

CostReport mlp_layer_cost(std::size_t n_in, std::size_t n_out, Activation a) {
    CostReport r = activation_cost(a, n_out);
    r.muls += n_in * n_out;
    r.adds += n_in * n_out + n_out;
    r.constant_memory_words += n_in * n_out + n_out;
    return r;
}

CostReport cost_report(const MlpNetwork& net) {
    CostReport total;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        total += mlp_layer_cost(net.layer_sizes()[l], net.layer_sizes()[l + 1], net.activations()[l]);
    }
    return total;
}

CostReport cost_report(const SymbolicNetwork& snet) {
    CostReport total;
    for (std::size_t l = 0; l < snet.layer_count(); ++l) {
        const std::size_t n_in = snet.layer_sizes[l];
        const std::size_t n_out = snet.layer_sizes[l + 1];
        for (const AffineFit& e : snet.edges[l]) total += symbolic_edge_cost(e.candidate);
        total.adds += n_out * (n_in - 1);
    }
    return total;
}

namespace {

std::string flt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(v)));
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s + "f";
}

std::string array_name(std::size_t layer) { return "h" + std::to_string(layer); }

std::string element(std::size_t layer, std::size_t index, std::size_t layers) {
    if (layer == 0) return "in[" + std::to_string(index) + "]";
    if (layer == layers) return "out[" + std::to_string(index) + "]";
    return array_name(layer) + "[" + std::to_string(index) + "]";
}

std::string c_expression(Candidate c) {
    switch (c) {
    case Candidate::constant: return "1.0f";
    case Candidate::identity: return "t";
    case Candidate::square: return "t * t";
    case Candidate::cube: return "t * t * t";
    case Candidate::quartic: return "(t * t) * (t * t)";
    case Candidate::reciprocal: return "1.0f / (fabsf(t) < 1e-6f ? copysignf(1e-6f, t) : t)";
    case Candidate::sqrt_abs: return "sqrtf(fabsf(t))";
    case Candidate::exp: return "expf(t)";
    case Candidate::log_abs: return "logf(fabsf(t) + 1e-6f)";
    case Candidate::abs: return "fabsf(t)";
    case Candidate::sin: return "sinf(t)";
    case Candidate::cos: return "cosf(t)";
    case Candidate::tanh: return "tanhf(t)";
    case Candidate::sigmoid: return "1.0f / (1.0f + expf(-t))";
    case Candidate::gaussian: return "expf(-(t * t))";
    }
    throw Error(ErrorCode::unsupported_activation, "unknown symbolic candidate");
}

void header(std::ostringstream& out, std::string_view name, std::size_t inputs, std::size_t outputs,
            const std::string& description) {
    out << "// " << description << "\n"
        << "// Generated by kanbench. Single-precision straight-line inference.\n"
        << "#include <math.h>\n\n"
        << "void " << name << "(const float in[" << inputs << "], float out[" << outputs << "])\n{\n";
}

std::string joined(const std::vector<std::size_t>& sizes) {
    std::string s;
    for (std::size_t i = 0; i < sizes.size(); ++i) s += (i ? "," : "") + std::to_string(sizes[i]);
    return s;
}

}  // namespace

std::string emit_inference_source(const MlpNetwork& net, std::string_view function_name) {
    std::ostringstream out;
    const std::size_t layers = net.layer_count();
    header(out, function_name, net.inputs(), net.outputs(), "MLP " + joined(net.layer_sizes()));
    for (std::size_t l = 1; l < layers; ++l) {
        out << "    float " << array_name(l) << "[" << net.layer_sizes()[l] << "];\n";
    }
    out << "    float z[" << net.outputs() << "];\n";
    out << "    float acc;\n";
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t n_in = net.layer_sizes()[l];
        const std::size_t n_out = net.layer_sizes()[l + 1];
        const bool last = l + 1 == layers;
        out << "\n    // layer " << l << ": " << n_in << " -> " << n_out << ", " << to_string(net.activations()[l]) << "\n";
        for (std::size_t o = 0; o < n_out; ++o) {
            out << "    acc = 0.0f;\n";
            for (std::size_t i = 0; i < n_in; ++i) {
                out << "    acc += " << flt(net.weight(l, o, i)) << " * " << element(l, i, layers) << ";\n";
            }
            const std::string target = last ? "z[" + std::to_string(o) + "]" : element(l + 1, o, layers);
            out << "    " << target << " = acc + " << flt(net.bias(l, o)) << ";\n";
            if (!last && net.activations()[l] == Activation::relu) {
                out << "    " << target << " = " << target << " > 0.0f ? " << target << " : 0.0f;\n";
            } else if (!last && net.activations()[l] == Activation::sigmoid) {
                out << "    " << target << " = 1.0f / (1.0f + expf(-" << target << "));\n";
            }
        }
    }
    const std::size_t width = net.outputs();
    switch (net.activations().back()) {
    case Activation::relu:
        for (std::size_t o = 0; o < width; ++o) out << "    out[" << o << "] = z[" << o << "] > 0.0f ? z[" << o << "] : 0.0f;\n";
        break;
    case Activation::sigmoid:
        for (std::size_t o = 0; o < width; ++o) out << "    out[" << o << "] = 1.0f / (1.0f + expf(-z[" << o << "]));\n";
        break;
    case Activation::linear:
        for (std::size_t o = 0; o < width; ++o) out << "    out[" << o << "] = z[" << o << "];\n";
        break;
    case Activation::softmax: {
        out << "    float peak = z[0];\n";
        for (std::size_t o = 1; o < width; ++o) out << "    if (z[" << o << "] > peak) peak = z[" << o << "];\n";
        for (std::size_t o = 0; o < width; ++o) out << "    z[" << o << "] = expf(z[" << o << "] - peak);\n";
        out << "    float den = z[0]";
        for (std::size_t o = 1; o < width; ++o) out << " + z[" << o << "]";
        out << ";\n";
        for (std::size_t o = 0; o < width; ++o) out << "    out[" << o << "] = z[" << o << "] / den;\n";
        break;
    }
    }
    out << "}\n";
    return out.str();
}

std::string emit_inference_source(const SymbolicNetwork& snet, std::string_view function_name) {
    std::ostringstream out;
    const std::size_t layers = snet.layer_count();
    header(out, function_name, snet.layer_sizes.front(), snet.layer_sizes.back(),
           "symbolic KAN " + joined(snet.layer_sizes));
    for (std::size_t l = 1; l < layers; ++l) {
        out << "    float " << array_name(l) << "[" << snet.layer_sizes[l] << "];\n";
    }
    out << "    float t;\n";
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t n_in = snet.layer_sizes[l];
        const std::size_t n_out = snet.layer_sizes[l + 1];
        out << "\n    // layer " << l << ": " << n_in << " -> " << n_out << "\n";
        for (std::size_t j = 0; j < n_out; ++j) {
            const std::string target = element(l + 1, j, layers);
            for (std::size_t i = 0; i < n_in; ++i) {
                const AffineFit& e = snet.edge(l, j, i);
                out << "    t = " << flt(e.a) << " * " << element(l, i, layers) << " + " << flt(e.b) << ";\n";
                out << "    " << target << (i == 0 ? " = " : " += ") << flt(e.c) << " * (" << c_expression(e.candidate)
                    << ") + " << flt(e.d) << ";  // " << to_string(e.candidate) << "\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

std::size_t count_multiplication_sites(std::string_view source) {
    std::size_t count = 0;
    bool line_comment = false;
    bool block_comment = false;
    for (std::size_t i = 0; i < source.size(); ++i) {
        const char ch = source[i];
        const char next = i + 1 < source.size() ? source[i + 1] : '\0';
        if (line_comment) {
            if (ch == '\n') line_comment = false;
            continue;
        }
        if (block_comment) {
            if (ch == '*' && next == '/') {
                block_comment = false;
                ++i;
            }
            continue;
        }
        if (ch == '/' && next == '/') {
            line_comment = true;
            ++i;
        } else if (ch == '/' && next == '*') {
            block_comment = true;
            ++i;
        } else if (ch == '*') {
            ++count;
        }
    }
    return count;
}

}  // namespace kanbench
