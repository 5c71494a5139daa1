#pragma once

// Kolmogorov-Arnold network: every edge (l, j, i) carries its own B-spline
// φ_{l,j,i}, and neuron j of layer l+1 sums φ_{l,j,i}(x_{l,i}) over i.
//
// Coefficients live in one flat vector so optimizers can treat the network
// as a parameter vector. Edge (l, j, i) owns the G + k entries starting at
// layer_offset(l) + (j * n_l + i) * (G + k).

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kanbench/matrix.hpp"
#include "kanbench/spline.hpp"

namespace kanbench {

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Half-width of the domain used for hidden-layer edges.
inline constexpr double kHiddenDomain = 3.0;

class KanNetwork {
public:
    KanNetwork() = default;
    /// Builds a network with zero coefficients; `input_domains` (one per
    /// input feature) default to [-1, 1].
    KanNetwork(std::vector<std::size_t> layer_sizes, int grid, int degree,
               std::vector<Interval> input_domains = {});

    const std::vector<std::size_t>& layer_sizes() const noexcept { return layer_sizes_; }
    std::size_t layer_count() const noexcept { return layer_sizes_.size() - 1; }
    std::size_t inputs() const noexcept { return layer_sizes_.front(); }
    std::size_t outputs() const noexcept { return layer_sizes_.back(); }
    int grid() const noexcept { return grid_; }
    int degree() const noexcept { return degree_; }
    std::size_t coeffs_per_edge() const noexcept { return static_cast<std::size_t>(grid_ + degree_); }
    std::uint64_t seed() const noexcept { return seed_; }
    void set_seed(std::uint64_t s) noexcept { seed_ = s; }

    /// Knot vector shared by all edges leaving neuron i of layer l.
    const KnotVector& knots(std::size_t layer, std::size_t input) const { return knots_[layer][input]; }
    std::vector<Interval> domains(std::size_t layer) const;
    /// Rebuilds the knot vector of neuron `input` of `layer` on a new domain.
    void set_domain(std::size_t layer, std::size_t input, Interval domain);

    std::size_t layer_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t edge_offset(std::size_t layer, std::size_t out, std::size_t in) const {
        return offsets_[layer] + (out * layer_sizes_[layer] + in) * coeffs_per_edge();
    }
    std::span<const double> edge_coeffs(std::size_t layer, std::size_t out, std::size_t in) const {
        return {params_.data() + edge_offset(layer, out, in), coeffs_per_edge()};
    }
    std::span<double> edge_coeffs(std::size_t layer, std::size_t out, std::size_t in) {
        return {params_.data() + edge_offset(layer, out, in), coeffs_per_edge()};
    }
    Spline edge(std::size_t layer, std::size_t out, std::size_t in) const;

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }
    std::size_t edge_count() const noexcept;

    /// Sub-network made of layers [first, last).
    KanNetwork slice(std::size_t first, std::size_t last) const;

    friend bool operator==(const KanNetwork&, const KanNetwork&) = default;

private:
    std::vector<std::size_t> layer_sizes_;
    int grid_ = 1;
    int degree_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<std::vector<KnotVector>> knots_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

struct KanForwardCache {
    /// activations[l] is the batch × n_l input of layer l; the last entry is
    /// the network output.
    std::vector<Matrix> activations;
    /// Per layer: batch × n_l first-basis index and batch × n_l × (k+1)
    /// basis values / derivatives of each input activation.
    std::vector<std::vector<std::size_t>> first_basis;
    std::vector<std::vector<double>> basis;
    std::vector<std::vector<double>> basis_deriv;
    std::size_t batch = 0;
};

/// Validates a layer shape; throws invalid-shape.
void validate_layer_sizes(std::span<const std::size_t> layer_sizes);

/// Domain for layer-0 edges: [-1, 1] widened to the observed range plus a
/// 5% margin on each side.
std::vector<Interval> input_domains_from_data(const Matrix& features);

KanNetwork kan_init(std::vector<std::size_t> layer_sizes, int grid, int degree, std::uint64_t seed,
                    std::vector<Interval> input_domains = {});

std::pair<Matrix, KanForwardCache> kan_forward(const KanNetwork& net, const Matrix& batch);
Matrix kan_predict(const KanNetwork& net, const Matrix& batch);

/// Gradients of Σ grad_output ⊙ output w.r.t. every coefficient, laid out
/// exactly like KanNetwork::params(). If `grad_input` is non-null it
/// receives the gradient w.r.t. the network input.
std::vector<double> kan_backward(const KanNetwork& net, const KanForwardCache& cache,
                                 const Matrix& grad_output, Matrix* grad_input = nullptr);

std::size_t kan_param_count(std::span<const std::size_t> layer_sizes, int grid, int degree);

}  // namespace kanbench
