#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "kanbench/matrix.hpp"

namespace kanbench {

enum class Activation { relu, sigmoid, softmax, linear };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Fully connected network. Parameters are one flat vector; layer l keeps
/// its n_out × n_in row-major weights followed by n_out biases.
class MlpNetwork {
public:
    MlpNetwork() = default;
    MlpNetwork(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations);

    const std::vector<std::size_t>& layer_sizes() const noexcept { return layer_sizes_; }
    const std::vector<Activation>& activations() const noexcept { return activations_; }
    std::size_t layer_count() const noexcept { return activations_.size(); }
    std::size_t inputs() const noexcept { return layer_sizes_.front(); }
    std::size_t outputs() const noexcept { return layer_sizes_.back(); }
    std::uint64_t seed() const noexcept { return seed_; }
    void set_seed(std::uint64_t s) noexcept { seed_ = s; }

    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + layer_sizes_[layer] * layer_sizes_[layer + 1];
    }
    double weight(std::size_t layer, std::size_t out, std::size_t in) const {
        return params_[weight_offset(layer) + out * layer_sizes_[layer] + in];
    }
    double& weight(std::size_t layer, std::size_t out, std::size_t in) {
        return params_[weight_offset(layer) + out * layer_sizes_[layer] + in];
    }
    double bias(std::size_t layer, std::size_t out) const { return params_[bias_offset(layer) + out]; }
    double& bias(std::size_t layer, std::size_t out) { return params_[bias_offset(layer) + out]; }

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }

    friend bool operator==(const MlpNetwork&, const MlpNetwork&) = default;

private:
    std::vector<std::size_t> layer_sizes_;
    std::vector<Activation> activations_;
    std::uint64_t seed_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

struct MlpForwardCache {
    /// inputs[l]: batch × n_l input to layer l; pre[l]: batch × n_{l+1}
    /// pre-activations; inputs.back() is the network output.
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre;
};

/// Which tensor a gradient handed to mlp_backward refers to.
enum class GradientSeat {
    output,  // post-activation network output
    logits,  // pre-activation of the final layer (joint softmax/CE path)
};

MlpNetwork mlp_init(std::vector<std::size_t> layer_sizes, std::vector<Activation> activations,
                    std::uint64_t seed);

std::pair<Matrix, MlpForwardCache> mlp_forward(const MlpNetwork& net, const Matrix& batch);
Matrix mlp_predict(const MlpNetwork& net, const Matrix& batch);

std::vector<double> mlp_backward(const MlpNetwork& net, const MlpForwardCache& cache, const Matrix& grad,
                                 GradientSeat seat = GradientSeat::output);

std::size_t mlp_param_count(std::span<const std::size_t> layer_sizes);

/// Row-wise softmax, shifted by the row max.
void softmax_rows(Matrix& m);
/// Vector-Jacobian product of a row-wise softmax: returns dL/dz given the
/// softmax output p and dL/dp.
Matrix softmax_backward(const Matrix& probs, const Matrix& grad);

}  // namespace kanbench
