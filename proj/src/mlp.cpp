#include "kanbench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "kanbench/error.hpp"
#include "kanbench/kan.hpp"
#include "kanbench/kernels.hpp"

namespace kanbench {

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softmax: return "softmax";
    case Activation::linear: return "linear";
    }
    return "linear";
}

Activation activation_from_string(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "softmax") return Activation::softmax;
    if (name == "linear") return Activation::linear;
    throw Error(ErrorCode::unsupported_activation, "unknown activation '" + std::string(name) + "'");
}

MlpNetwork::MlpNetwork(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations)
    : layer_sizes_(std::move(layer_sizes)), activations_(std::move(activations)) {
    validate_layer_sizes(layer_sizes_);
    if (activations_.size() != layer_sizes_.size() - 1) {
        throw Error(ErrorCode::invalid_shape, "need one activation per non-input layer");
    }
    for (std::size_t l = 0; l + 1 < activations_.size(); ++l) {
        if (activations_[l] == Activation::softmax) {
            throw Error(ErrorCode::softmax_not_last, "softmax is only allowed on the final layer");
        }
    }
    offsets_.resize(activations_.size());
    std::size_t offset = 0;
    for (std::size_t l = 0; l < activations_.size(); ++l) {
        offsets_[l] = offset;
        offset += layer_sizes_[l] * layer_sizes_[l + 1] + layer_sizes_[l + 1];
    }
    params_.assign(offset, 0.0);
}

MlpNetwork mlp_init(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations,
                    std::uint64_t seed) {
    MlpNetwork net(std::move(layer_sizes), std::move(activations));
    net.set_seed(seed);
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const std::size_t n_in = net.layer_sizes()[l];
        std::normal_distribution<double> he(0.0, std::sqrt(2.0 / static_cast<double>(n_in)));
        for (std::size_t o = 0; o < net.layer_sizes()[l + 1]; ++o) {
            for (std::size_t i = 0; i < n_in; ++i) net.weight(l, o, i) = he(rng);
        }
    }
    return net;
}

void softmax_rows(Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        const double peak = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (double& v : row) {
            v = std::exp(v - peak);
            total += v;
        }
        for (double& v : row) v /= total;
    }
}

Matrix softmax_backward(const Matrix& probs, const Matrix& grad) {
    Matrix out(probs.rows(), probs.cols());
    for (std::size_t r = 0; r < probs.rows(); ++r) {
        const double inner = kernels::dot(probs.row(r), grad.row(r));
        for (std::size_t c = 0; c < probs.cols(); ++c) out(r, c) = probs(r, c) * (grad(r, c) - inner);
    }
    return out;
}

namespace {

void activate(Activation a, Matrix& m) {
    switch (a) {
    case Activation::relu:
        for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
        break;
    case Activation::sigmoid:
        for (double& v : m.data()) v = 1.0 / (1.0 + std::exp(-v));
        break;
    case Activation::softmax: softmax_rows(m); break;
    case Activation::linear: break;
    }
}

// dL/dz from dL/da for one layer.
Matrix activation_backward(Activation a, const Matrix& pre, const Matrix& post, const Matrix& grad) {
    switch (a) {
    case Activation::relu: {
        Matrix out(grad.rows(), grad.cols());
        for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = pre.data()[i] > 0.0 ? grad.data()[i] : 0.0;
        return out;
    }
    case Activation::sigmoid: {
        Matrix out(grad.rows(), grad.cols());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double p = post.data()[i];
            out.data()[i] = grad.data()[i] * p * (1.0 - p);
        }
        return out;
    }
    case Activation::softmax: return softmax_backward(post, grad);
    case Activation::linear: return grad;
    }
    return grad;
}

}  // namespace

std::pair<Matrix, MlpForwardCache> mlp_forward(const MlpNetwork& net, const Matrix& batch) {
    if (batch.cols() != net.inputs()) {
        throw Error(ErrorCode::shape_mismatch, "batch has " + std::to_string(batch.cols()) +
                                                   " columns, network expects " + std::to_string(net.inputs()));
    }
    MlpForwardCache cache;
    cache.inputs.push_back(batch);
    const auto params = net.params();
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const std::size_t n_in = net.layer_sizes()[l];
        const std::size_t n_out = net.layer_sizes()[l + 1];
        const Matrix& x = cache.inputs.back();
        Matrix z(x.rows(), n_out);
        for (std::size_t s = 0; s < x.rows(); ++s) {
            for (std::size_t o = 0; o < n_out; ++o) {
                std::span<const double> w(params.data() + net.weight_offset(l) + o * n_in, n_in);
                z(s, o) = kernels::dot(w, x.row(s)) + net.bias(l, o);
            }
        }
        Matrix a = z;
        activate(net.activations()[l], a);
        cache.pre.push_back(std::move(z));
        cache.inputs.push_back(std::move(a));
    }
    Matrix out = cache.inputs.back();
    return {std::move(out), std::move(cache)};
}

Matrix mlp_predict(const MlpNetwork& net, const Matrix& batch) {
    return mlp_forward(net, batch).first;
}

std::vector<double> mlp_backward(const MlpNetwork& net, const MlpForwardCache& cache, const Matrix& grad,
                                 GradientSeat seat) {
    const std::size_t layers = net.layer_count();
    if (cache.pre.size() != layers || cache.inputs.size() != layers + 1) {
        throw Error(ErrorCode::stale_cache, "cache layer count does not match network");
    }
    const std::size_t n = cache.inputs.front().rows();
    for (std::size_t l = 0; l < layers; ++l) {
        if (cache.pre[l].rows() != n || cache.pre[l].cols() != net.layer_sizes()[l + 1] ||
            cache.inputs[l].cols() != net.layer_sizes()[l]) {
            throw Error(ErrorCode::stale_cache, "cache shapes do not match network");
        }
    }
    if (grad.rows() != n || grad.cols() != net.outputs()) {
        throw Error(ErrorCode::shape_mismatch, "gradient must be batch × n_L");
    }

    const auto params = net.params();
    std::vector<double> grads(params.size(), 0.0);
    Matrix upstream = grad;
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t n_in = net.layer_sizes()[l];
        const std::size_t n_out = net.layer_sizes()[l + 1];
        Matrix dz = (l == layers - 1 && seat == GradientSeat::logits)
                        ? upstream
                        : activation_backward(net.activations()[l], cache.pre[l], cache.inputs[l + 1], upstream);
        const Matrix& x = cache.inputs[l];
        Matrix dx(n, n_in, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t o = 0; o < n_out; ++o) {
                const double g = dz(s, o);
                if (g == 0.0) continue;
                kernels::axpy(g, x.row(s), {grads.data() + net.weight_offset(l) + o * n_in, n_in});
                grads[net.bias_offset(l) + o] += g;
                if (l > 0) kernels::axpy(g, {params.data() + net.weight_offset(l) + o * n_in, n_in}, dx.row(s));
            }
        }
        upstream = std::move(dx);
    }
    return grads;
}

std::size_t mlp_param_count(std::span<const std::size_t> layer_sizes) {
    validate_layer_sizes(layer_sizes);
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) n += layer_sizes[l] * layer_sizes[l + 1] + layer_sizes[l + 1];
    return n;
}

}  // namespace kanbench
