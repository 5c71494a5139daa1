#pragma once

// Straight-line C99 inference source for trained models, plus a static
// operation count of exactly that source.

#include <cstddef>
#include <string>
#include <string_view>

#include "kanbench/mlp.hpp"
#include "kanbench/symbolic.hpp"

namespace kanbench {

/// DSP-equivalent weights of the cost proxy.
inline constexpr double kMulWeight = 1.0;
inline constexpr double kDivWeight = 4.0;
inline constexpr double kTranscendentalWeight = 8.0;

struct CostReport {
    std::size_t adds = 0;
    std::size_t muls = 0;
    std::size_t divs = 0;
    std::size_t transcendental_calls = 0;
    std::size_t comparisons = 0;
    std::size_t constant_memory_words = 0;

    double weighted_dsp_equiv() const noexcept {
        return static_cast<double>(muls) * kMulWeight + static_cast<double>(divs) * kDivWeight +
               static_cast<double>(transcendental_calls) * kTranscendentalWeight;
    }

    CostReport& operator+=(const CostReport& o) noexcept;
    friend CostReport operator+(CostReport a, const CostReport& b) noexcept { return a += b; }
    friend bool operator==(const CostReport&, const CostReport&) = default;
};

/// Cost of f(t) alone for a symbolic candidate.
CostReport candidate_cost(Candidate c);
/// Cost of one affine-wrapped edge c·f(a·t + b) + d.
CostReport symbolic_edge_cost(Candidate c);
CostReport activation_cost(Activation a, std::size_t width);
CostReport mlp_layer_cost(std::size_t n_in, std::size_t n_out, Activation a);

CostReport cost_report(const MlpNetwork& net);
CostReport cost_report(const SymbolicNetwork& snet);

std::string emit_inference_source(const MlpNetwork& net, std::string_view function_name);
std::string emit_inference_source(const SymbolicNetwork& snet, std::string_view function_name);

/// Number of binary multiplication operators in C source, ignoring
/// comments.
std::size_t count_multiplication_sites(std::string_view source);

}  // namespace kanbench
