#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kanbench/datasets.hpp"
#include "kanbench/kan.hpp"
#include "kanbench/matrix.hpp"
#include "kanbench/mlp.hpp"

namespace kanbench {

enum class LossKind { mse, cross_entropy };
enum class OptimizerKind { adam, lbfgs };
enum class DecisionRule { threshold_0_5, argmax };

std::string_view to_string(LossKind k);
std::string_view to_string(OptimizerKind k);
LossKind loss_from_string(std::string_view name);
OptimizerKind optimizer_from_string(std::string_view name);

struct LossResult {
    double value = 0.0;
    /// d loss / d predictions for MSE; d loss / d logits (p - y) / N for
    /// cross-entropy, whose predictions are softmax probabilities.
    Matrix grad;
};

/// MSE is the mean over every entry; cross-entropy is the mean over rows
/// and requires one-hot targets.
LossResult loss_eval(LossKind kind, const Matrix& predictions, const Matrix& targets);

struct TrainConfig {
    std::size_t epochs = 200;
    double learning_rate = 0.0002;
    OptimizerKind optimizer = OptimizerKind::adam;
    LossKind loss = LossKind::mse;
    std::uint64_t seed = 0;
    /// Adam minibatch size; 0 means full batch. L-BFGS is always full batch.
    std::size_t batch_size = 64;
    std::size_t lbfgs_history = 10;
    double lbfgs_tolerance = 1e-10;
};

struct TrainReport {
    /// Full-training-set loss after each epoch.
    std::vector<double> losses;
    double initial_loss = 0.0;
    double seconds = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::size_t epochs_run = 0;
    std::string stop_reason;
};

/// Multiclass KAN outputs go through a softmax before the loss; a width-1
/// KAN output is used directly.
std::pair<KanNetwork, TrainReport> train(KanNetwork model, const Dataset& train_set, const TrainConfig& config,
                                         const Dataset* test_set = nullptr);
std::pair<MlpNetwork, TrainReport> train(MlpNetwork model, const Dataset& train_set, const TrainConfig& config,
                                         const Dataset* test_set = nullptr);

/// Full-batch loss and gradient w.r.t. the flat parameter vector.
double loss_and_gradient(const KanNetwork& net, const Matrix& inputs, const Matrix& targets, LossKind loss,
                         std::vector<double>& grad);
double loss_and_gradient(const MlpNetwork& net, const Matrix& inputs, const Matrix& targets, LossKind loss,
                         std::vector<double>& grad);

DecisionRule default_rule(std::size_t output_width);
double accuracy_from_outputs(const Matrix& outputs, const std::vector<int>& labels, DecisionRule rule);
double evaluate_accuracy(const KanNetwork& net, const Dataset& data, DecisionRule rule);
double evaluate_accuracy(const MlpNetwork& net, const Dataset& data, DecisionRule rule);

}  // namespace kanbench
