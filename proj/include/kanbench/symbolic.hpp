#pragma once

// Post-training replacement of every KAN edge spline by an affine-wrapped
// elementary function y = c·f(a·x + b) + d.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kanbench/kan.hpp"
#include "kanbench/matrix.hpp"

namespace kanbench {

/// Declaration order is the complexity rank used to break R² ties.
enum class Candidate {
    constant,
    identity,
    square,
    cube,
    quartic,
    reciprocal,
    sqrt_abs,
    exp,
    log_abs,
    abs,
    sin,
    cos,
    tanh,
    sigmoid,
    gaussian,
};

inline constexpr std::size_t kCandidateCount = 15;
inline constexpr std::array<Candidate, kCandidateCount> kCandidates = {
    Candidate::constant, Candidate::identity, Candidate::square,  Candidate::cube,     Candidate::quartic,
    Candidate::reciprocal, Candidate::sqrt_abs, Candidate::exp,   Candidate::log_abs,  Candidate::abs,
    Candidate::sin,      Candidate::cos,      Candidate::tanh,    Candidate::sigmoid,  Candidate::gaussian,
};

/// Samples handed to the fitter are thinned to at most this many points.
inline constexpr std::size_t kMaxFitSamples = 512;
inline constexpr std::size_t kMinFitSamples = 8;

int complexity_rank(Candidate c);
std::string_view to_string(Candidate c);
Candidate candidate_from_string(std::string_view name);

/// Guarded candidate: reciprocal floors |t| at 1e-6 (sign kept), log uses
/// log(|t| + 1e-6), so every candidate is total on the reals.
double apply_candidate(Candidate c, double t);

struct AffineFit {
    Candidate candidate = Candidate::constant;
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double r2 = 0.0;
    double max_abs_residual = 0.0;

    double operator()(double x) const { return c * apply_candidate(candidate, a * x + b) + d; }
    friend bool operator==(const AffineFit&, const AffineFit&) = default;
};

AffineFit fit_affine(Candidate candidate, std::span<const double> xs, std::span<const double> ys);

struct EdgeAudit {
    std::size_t layer = 0;
    std::size_t out = 0;
    std::size_t in = 0;
    std::size_t samples = 0;
    std::array<double, kCandidateCount> r2{};
};

struct SymbolicNetwork {
    std::vector<std::size_t> layer_sizes;
    /// edges[l][j * n_l + i] replaces φ_{l,j,i}.
    std::vector<std::vector<AffineFit>> edges;
    std::vector<EdgeAudit> audit;

    std::size_t layer_count() const noexcept { return edges.size(); }
    const AffineFit& edge(std::size_t l, std::size_t j, std::size_t i) const {
        return edges[l][j * layer_sizes[l] + i];
    }
    AffineFit& edge(std::size_t l, std::size_t j, std::size_t i) { return edges[l][j * layer_sizes[l] + i]; }
};

/// Per layer, per input neuron: the activation values observed there.
/// Every edge leaving neuron (l, i) is fitted on samples[l][i].
using EdgeSamples = std::vector<std::vector<std::vector<double>>>;

/// Forward pass over `inputs`, keeping a rank-evenly thinned, sorted set of
/// at most kMaxFitSamples activations per neuron.
EdgeSamples collect_edge_samples(const KanNetwork& net, const Matrix& inputs,
                                 std::size_t max_samples = kMaxFitSamples);

/// Fits every candidate on every edge and keeps the best R² (ties within
/// 1e-12 go to the lower complexity rank).
SymbolicNetwork symbolify_network(const KanNetwork& net, const EdgeSamples& samples);

Matrix symbolic_eval(const SymbolicNetwork& snet, const Matrix& batch);

/// One fully expanded expression per output neuron, inputs named x0, x1, ...
std::string formula_dump(const SymbolicNetwork& snet);

/// Textual form of a candidate applied to an argument expression.
std::string candidate_expression(Candidate c, const std::string& arg);

}  // namespace kanbench
