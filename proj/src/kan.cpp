#include "kanbench/kan.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kanbench/error.hpp"

namespace kanbench {

void validate_layer_sizes(std::span<const std::size_t> layer_sizes) {
    if (layer_sizes.size() < 2) throw Error(ErrorCode::invalid_shape, "need at least an input and an output layer");
    for (std::size_t n : layer_sizes) {
        if (n == 0) throw Error(ErrorCode::invalid_shape, "layer sizes must be >= 1");
    }
}

KanNetwork::KanNetwork(std::vector<std::size_t> layer_sizes, int grid, int degree,
                       std::vector<Interval> input_domains)
    : layer_sizes_(std::move(layer_sizes)), grid_(grid), degree_(degree) {
    validate_layer_sizes(layer_sizes_);
    if (grid < 1) throw Error(ErrorCode::invalid_grid, "grid must be >= 1");
    if (degree < 0) throw Error(ErrorCode::invalid_grid, "degree must be >= 0");
    if (input_domains.empty()) input_domains.assign(layer_sizes_.front(), Interval{});
    if (input_domains.size() != layer_sizes_.front()) {
        throw Error(ErrorCode::invalid_shape, "one input domain per input feature required");
    }

    const std::size_t layers = layer_sizes_.size() - 1;
    knots_.resize(layers);
    offsets_.resize(layers + 1);
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t n_in = layer_sizes_[l];
        knots_[l].reserve(n_in);
        for (std::size_t i = 0; i < n_in; ++i) {
            const Interval d = (l == 0) ? input_domains[i] : Interval{-kHiddenDomain, kHiddenDomain};
            knots_[l].push_back(build_knot_vector(d.lo, d.hi, grid, degree));
        }
        offsets_[l] = offset;
        offset += n_in * layer_sizes_[l + 1] * coeffs_per_edge();
    }
    offsets_[layers] = offset;
    params_.assign(offset, 0.0);
}

std::vector<Interval> KanNetwork::domains(std::size_t layer) const {
    std::vector<Interval> out;
    for (const auto& kv : knots_[layer]) out.push_back({kv.domain_lo, kv.domain_hi});
    return out;
}

void KanNetwork::set_domain(std::size_t layer, std::size_t input, Interval domain) {
    knots_.at(layer).at(input) = build_knot_vector(domain.lo, domain.hi, grid_, degree_);
}

Spline KanNetwork::edge(std::size_t layer, std::size_t out, std::size_t in) const {
    auto c = edge_coeffs(layer, out, in);
    return Spline{knots_[layer][in], std::vector<double>(c.begin(), c.end())};
}

std::size_t KanNetwork::edge_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) n += layer_sizes_[l] * layer_sizes_[l + 1];
    return n;
}

KanNetwork KanNetwork::slice(std::size_t first, std::size_t last) const {
    if (first >= last || last > layer_count()) throw Error(ErrorCode::invalid_shape, "bad layer slice");
    std::vector<std::size_t> sizes(layer_sizes_.begin() + first, layer_sizes_.begin() + last + 1);
    KanNetwork sub(sizes, grid_, degree_, domains(first));
    sub.seed_ = seed_;
    for (std::size_t l = first; l < last; ++l) sub.knots_[l - first] = knots_[l];
    std::copy(params_.begin() + offsets_[first], params_.begin() + offsets_[last], sub.params_.begin());
    return sub;
}

std::vector<Interval> input_domains_from_data(const Matrix& features) {
    std::vector<Interval> out(features.cols());
    for (std::size_t c = 0; c < features.cols(); ++c) {
        double lo = features.rows() ? features(0, c) : -1.0;
        double hi = lo;
        for (std::size_t r = 0; r < features.rows(); ++r) {
            lo = std::min(lo, features(r, c));
            hi = std::max(hi, features(r, c));
        }
        const double margin = 0.05 * (hi - lo);
        out[c] = {std::min(-1.0, lo - margin), std::max(1.0, hi + margin)};
    }
    return out;
}

KanNetwork kan_init(std::vector<std::size_t> layer_sizes, int grid, int degree, std::uint64_t seed,
                    std::vector<Interval> input_domains) {
    KanNetwork net(std::move(layer_sizes), grid, degree, std::move(input_domains));
    net.set_seed(seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 0.1 / std::sqrt(static_cast<double>(grid + degree)));
    for (double& c : net.params()) c = normal(rng);
    return net;
}

std::pair<Matrix, KanForwardCache> kan_forward(const KanNetwork& net, const Matrix& batch) {
    if (batch.cols() != net.inputs()) {
        throw Error(ErrorCode::shape_mismatch, "batch has " + std::to_string(batch.cols()) +
                                                   " columns, network expects " + std::to_string(net.inputs()));
    }
    const std::size_t n = batch.rows();
    const std::size_t width = static_cast<std::size_t>(net.degree() + 1);
    const bool smooth = net.degree() > 0;

    KanForwardCache cache;
    cache.batch = n;
    cache.activations.reserve(net.layer_count() + 1);
    cache.activations.push_back(batch);
    const auto params = net.params();

    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const std::size_t n_in = net.layer_sizes()[l];
        const std::size_t n_out = net.layer_sizes()[l + 1];
        const Matrix& x = cache.activations.back();
        std::vector<std::size_t> first(n * n_in);
        std::vector<double> basis(n * n_in * width);
        std::vector<double> deriv(smooth ? n * n_in * width : 0);
        Matrix y(n, n_out, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t i = 0; i < n_in; ++i) {
                const KnotVector& kv = net.knots(l, i);
                const std::size_t slot = s * n_in + i;
                std::span<double> b(basis.data() + slot * width, width);
                first[slot] = local_basis(kv, x(s, i), b);
                if (smooth) local_basis_derivatives(kv, x(s, i), {deriv.data() + slot * width, width});
                for (std::size_t j = 0; j < n_out; ++j) {
                    const double* c = params.data() + net.edge_offset(l, j, i) + first[slot];
                    double phi = 0.0;
                    for (std::size_t m = 0; m < width; ++m) phi += c[m] * b[m];
                    y(s, j) += phi;
                }
            }
        }
        cache.first_basis.push_back(std::move(first));
        cache.basis.push_back(std::move(basis));
        cache.basis_deriv.push_back(std::move(deriv));
        cache.activations.push_back(std::move(y));
    }
    Matrix out = cache.activations.back();
    return {std::move(out), std::move(cache)};
}

Matrix kan_predict(const KanNetwork& net, const Matrix& batch) {
    return kan_forward(net, batch).first;
}

std::vector<double> kan_backward(const KanNetwork& net, const KanForwardCache& cache,
                                 const Matrix& grad_output, Matrix* grad_input) {
    const std::size_t layers = net.layer_count();
    const std::size_t n = cache.batch;
    const std::size_t width = static_cast<std::size_t>(net.degree() + 1);
    if (cache.activations.size() != layers + 1 || cache.basis.size() != layers) {
        throw Error(ErrorCode::stale_cache, "cache layer count does not match network");
    }
    for (std::size_t l = 0; l <= layers; ++l) {
        if (cache.activations[l].rows() != n || cache.activations[l].cols() != net.layer_sizes()[l]) {
            throw Error(ErrorCode::stale_cache, "cache activation shape does not match network");
        }
    }
    if (grad_output.rows() != n || grad_output.cols() != net.outputs()) {
        throw Error(ErrorCode::shape_mismatch, "grad_output must be batch × n_L");
    }

    const auto params = net.params();
    std::vector<double> grads(params.size(), 0.0);
    Matrix upstream = grad_output;
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t n_in = net.layer_sizes()[l];
        const std::size_t n_out = net.layer_sizes()[l + 1];
        const bool need_input_grad = l > 0 || grad_input != nullptr;
        const bool smooth = net.degree() > 0;
        Matrix down(n, n_in, 0.0);
        const auto& first = cache.first_basis[l];
        const auto& basis = cache.basis[l];
        const auto& deriv = cache.basis_deriv[l];
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t i = 0; i < n_in; ++i) {
                const std::size_t slot = s * n_in + i;
                const double* b = basis.data() + slot * width;
                const double* db = smooth ? deriv.data() + slot * width : nullptr;
                double gx = 0.0;
                for (std::size_t j = 0; j < n_out; ++j) {
                    const double g = upstream(s, j);
                    if (g == 0.0) continue;
                    const std::size_t base = net.edge_offset(l, j, i) + first[slot];
                    double* gc = grads.data() + base;
                    for (std::size_t m = 0; m < width; ++m) gc[m] += g * b[m];
                    if (need_input_grad && smooth) {
                        const double* c = params.data() + base;
                        double dphi = 0.0;
                        for (std::size_t m = 0; m < width; ++m) dphi += c[m] * db[m];
                        gx += g * dphi;
                    }
                }
                down(s, i) = gx;
            }
        }
        upstream = std::move(down);
    }
    if (grad_input) *grad_input = std::move(upstream);
    return grads;
}

std::size_t kan_param_count(std::span<const std::size_t> layer_sizes, int grid, int degree) {
    validate_layer_sizes(layer_sizes);
    if (grid < 1) throw Error(ErrorCode::invalid_grid, "grid must be >= 1");
    if (degree < 0) throw Error(ErrorCode::invalid_grid, "degree must be >= 0");
    std::size_t edges = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) edges += layer_sizes[l] * layer_sizes[l + 1];
    return edges * static_cast<std::size_t>(grid + degree);
}

}  // namespace kanbench
