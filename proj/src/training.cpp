#include "kanbench/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "kanbench/error.hpp"
#include "kanbench/optim.hpp"

namespace kanbench {

std::string_view to_string(LossKind k) { return k == LossKind::mse ? "mse" : "cross_entropy"; }
std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "lbfgs"; }

LossKind loss_from_string(std::string_view name) {
    if (name == "mse") return LossKind::mse;
    if (name == "cross_entropy") return LossKind::cross_entropy;
    throw Error(ErrorCode::invalid_config, "unknown loss '" + std::string(name) + "'");
}

OptimizerKind optimizer_from_string(std::string_view name) {
    if (name == "adam") return OptimizerKind::adam;
    if (name == "lbfgs") return OptimizerKind::lbfgs;
    throw Error(ErrorCode::invalid_config, "unknown optimizer '" + std::string(name) + "'");
}

LossResult loss_eval(LossKind kind, const Matrix& predictions, const Matrix& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols() || predictions.empty()) {
        throw Error(ErrorCode::shape_mismatch, "predictions and targets must have the same non-empty shape");
    }
    LossResult out{0.0, Matrix(predictions.rows(), predictions.cols())};
    if (kind == LossKind::mse) {
        const auto n = static_cast<double>(predictions.size());
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            const double d = predictions.data()[i] - targets.data()[i];
            out.value += d * d;
            out.grad.data()[i] = 2.0 * d / n;
        }
        out.value /= n;
        return out;
    }
    const auto rows = static_cast<double>(predictions.rows());
    for (std::size_t r = 0; r < predictions.rows(); ++r) {
        std::size_t hot = predictions.cols();
        for (std::size_t c = 0; c < predictions.cols(); ++c) {
            const double t = targets(r, c);
            if (t == 1.0 && hot == predictions.cols()) {
                hot = c;
            } else if (t != 0.0) {
                throw Error(ErrorCode::non_one_hot, "cross-entropy targets must be one-hot (row " + std::to_string(r) + ")");
            }
        }
        if (hot == predictions.cols()) {
            throw Error(ErrorCode::non_one_hot, "cross-entropy target row " + std::to_string(r) + " has no hot entry");
        }
        out.value -= std::log(std::max(predictions(r, hot), 1e-300));
        for (std::size_t c = 0; c < predictions.cols(); ++c) out.grad(r, c) = (predictions(r, c) - targets(r, c)) / rows;
    }
    out.value /= rows;
    return out;
}

double loss_and_gradient(const KanNetwork& net, const Matrix& inputs, const Matrix& targets, LossKind loss,
                         std::vector<double>& grad) {
    auto [raw, cache] = kan_forward(net, inputs);
    const bool multiclass = net.outputs() > 1;
    if (loss == LossKind::cross_entropy && !multiclass) {
        throw Error(ErrorCode::invalid_config, "cross-entropy needs a multiclass (softmax) output");
    }
    if (!multiclass) {
        LossResult l = loss_eval(loss, raw, targets);
        grad = kan_backward(net, cache, l.grad);
        return l.value;
    }
    Matrix probs = raw;
    softmax_rows(probs);
    LossResult l = loss_eval(loss, probs, targets);
    const Matrix logits_grad = (loss == LossKind::cross_entropy) ? l.grad : softmax_backward(probs, l.grad);
    grad = kan_backward(net, cache, logits_grad);
    return l.value;
}

double loss_and_gradient(const MlpNetwork& net, const Matrix& inputs, const Matrix& targets, LossKind loss,
                         std::vector<double>& grad) {
    auto [out, cache] = mlp_forward(net, inputs);
    if (loss == LossKind::cross_entropy && net.activations().back() != Activation::softmax) {
        throw Error(ErrorCode::invalid_config, "cross-entropy needs a softmax output layer");
    }
    LossResult l = loss_eval(loss, out, targets);
    grad = mlp_backward(net, cache, l.grad,
                        loss == LossKind::cross_entropy ? GradientSeat::logits : GradientSeat::output);
    return l.value;
}

DecisionRule default_rule(std::size_t output_width) {
    return output_width == 1 ? DecisionRule::threshold_0_5 : DecisionRule::argmax;
}

double accuracy_from_outputs(const Matrix& outputs, const std::vector<int>& labels, DecisionRule rule) {
    if (outputs.rows() != labels.size()) throw Error(ErrorCode::shape_mismatch, "one output row per label required");
    if ((rule == DecisionRule::threshold_0_5) != (outputs.cols() == 1)) {
        throw Error(ErrorCode::width_rule_mismatch, "threshold rule needs width 1, argmax needs width >= 2");
    }
    if (labels.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t r = 0; r < outputs.rows(); ++r) {
        int predicted = 0;
        if (rule == DecisionRule::threshold_0_5) {
            predicted = outputs(r, 0) >= 0.5 ? 1 : 0;
        } else {
            auto row = outputs.row(r);
            predicted = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
        }
        if (predicted == labels[r]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double evaluate_accuracy(const KanNetwork& net, const Dataset& data, DecisionRule rule) {
    return accuracy_from_outputs(kan_predict(net, data.features), data.labels, rule);
}

double evaluate_accuracy(const MlpNetwork& net, const Dataset& data, DecisionRule rule) {
    return accuracy_from_outputs(mlp_predict(net, data.features), data.labels, rule);
}

namespace {

void check_finite(double loss, std::size_t epoch) {
    if (!std::isfinite(loss)) {
        throw Error(ErrorCode::non_finite, "training loss became non-finite at epoch " + std::to_string(epoch));
    }
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto src = m.row(rows[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

template <class Net>
std::pair<Net, TrainReport> train_impl(Net model, const Dataset& train_set, const TrainConfig& config,
                                       const Dataset* test_set) {
    if (config.epochs < 1) throw Error(ErrorCode::invalid_config, "epochs must be >= 1");
    if (!(config.learning_rate >= 0.0)) throw Error(ErrorCode::invalid_config, "learning rate must be non-negative");
    if (train_set.features.cols() != model.inputs()) {
        throw Error(ErrorCode::shape_mismatch, "dataset width does not match the model input");
    }
    for (int y : train_set.labels) {
        if (y < 0 || y >= train_set.class_count ||
            (model.outputs() > 1 && static_cast<std::size_t>(y) >= model.outputs())) {
            throw Error(ErrorCode::invalid_config, "label out of range for the model output");
        }
    }

    const Matrix targets = encode_targets(train_set.labels, model.outputs());
    TrainReport report;
    std::vector<double> grad;
    const auto started = std::chrono::steady_clock::now();
    report.initial_loss = loss_and_gradient(model, train_set.features, targets, config.loss, grad);
    check_finite(report.initial_loss, 0);

    if (config.optimizer == OptimizerKind::adam) {
        AdamState state = adam_init(model.params().size());
        std::mt19937_64 rng(config.seed);
        std::vector<std::size_t> order(train_set.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        const std::size_t batch = (config.batch_size == 0) ? order.size() : config.batch_size;
        for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t start = 0; start < order.size(); start += batch) {
                const std::size_t stop = std::min(order.size(), start + batch);
                std::span<const std::size_t> rows(order.data() + start, stop - start);
                const Matrix xb = gather_rows(train_set.features, rows);
                const Matrix tb = gather_rows(targets, rows);
                check_finite(loss_and_gradient(model, xb, tb, config.loss, grad), epoch);
                adam_step(state, model.params(), grad, config.learning_rate);
            }
            const double epoch_loss = loss_and_gradient(model, train_set.features, targets, config.loss, grad);
            check_finite(epoch_loss, epoch);
            report.losses.push_back(epoch_loss);
        }
        report.stop_reason = "epochs";
    } else {
        Objective objective = [&](std::span<const double> x, std::span<double> g) {
            std::copy(x.begin(), x.end(), model.params().begin());
            std::vector<double> local;
            const double value = loss_and_gradient(model, train_set.features, targets, config.loss, local);
            std::copy(local.begin(), local.end(), g.begin());
            return value;
        };
        LbfgsOptions options;
        options.history = config.lbfgs_history;
        options.max_iters = config.epochs;
        options.tolerance = config.lbfgs_tolerance;
        std::vector<double> x0(model.params().begin(), model.params().end());
        LbfgsMinimizer minimizer(objective, std::move(x0), options);
        while (minimizer.step()) {
            check_finite(minimizer.value(), minimizer.iterations());
            report.losses.push_back(minimizer.value());
        }
        std::copy(minimizer.x().begin(), minimizer.x().end(), model.params().begin());
        switch (minimizer.status()) {
        case LbfgsStatus::converged: report.stop_reason = "converged"; break;
        case LbfgsStatus::line_search_failure: report.stop_reason = "line_search_failure"; break;
        default: report.stop_reason = "epochs"; break;
        }
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.epochs_run = report.losses.size();
    const DecisionRule rule = default_rule(model.outputs());
    report.train_accuracy = evaluate_accuracy(model, train_set, rule);
    if (test_set) report.test_accuracy = evaluate_accuracy(model, *test_set, rule);
    return {std::move(model), std::move(report)};
}

}  // namespace

std::pair<KanNetwork, TrainReport> train(KanNetwork model, const Dataset& train_set, const TrainConfig& config,
                                         const Dataset* test_set) {
    return train_impl(std::move(model), train_set, config, test_set);
}

std::pair<MlpNetwork, TrainReport> train(MlpNetwork model, const Dataset& train_set, const TrainConfig& config,
                                         const Dataset* test_set) {
    return train_impl(std::move(model), train_set, config, test_set);
}

}  // namespace kanbench
