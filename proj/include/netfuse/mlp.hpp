#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "netfuse/dataset.hpp"
#include "netfuse/rng.hpp"

namespace netfuse {

class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& message, int epoch)
        : std::runtime_error(message + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

namespace mlp {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
struct Config {
    std::vector<int> hidden_sizes{40};
    Scalar learning_rate = Scalar(0.01);
    int epochs = 50;
    int batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const {
        for (int h : hidden_sizes) {
            if (h <= 0) throw std::invalid_argument("mlp: hidden sizes must be positive");
        }
        if (!(learning_rate > Scalar(0))) throw std::invalid_argument("mlp: learning_rate must be positive");
        if (epochs <= 0) throw std::invalid_argument("mlp: epochs must be positive");
        if (batch_size <= 0) throw std::invalid_argument("mlp: batch_size must be positive");
    }
};

// Fully-connected layers with logistic sigmoid on hidden and output units;
// weights[l] is (out x in), chained from input_dim down to a single output.
template <class Scalar>
struct Model {
    std::vector<MatrixX<Scalar>> weights;
    std::vector<VectorX<Scalar>> biases;
    double validation_pcc = 0.0;

    int input_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.front().cols()); }
    std::size_t layer_count() const { return weights.size(); }

    bool finite() const {
        for (const auto& w : weights) {
            if (!w.allFinite()) return false;
        }
        for (const auto& b : biases) {
            if (!b.allFinite()) return false;
        }
        return true;
    }

    void check_chain() const {
        if (weights.size() != biases.size() || weights.empty()) {
            throw std::runtime_error("mlp: layer lists are inconsistent");
        }
        for (std::size_t l = 0; l < weights.size(); ++l) {
            if (biases[l].size() != weights[l].rows()) {
                throw std::runtime_error("mlp: bias size does not match layer " + std::to_string(l));
            }
            if (l + 1 < weights.size() && weights[l + 1].cols() != weights[l].rows()) {
                throw std::runtime_error("mlp: layer dimensions do not chain at layer " +
                                         std::to_string(l));
            }
        }
        if (weights.back().rows() != 1) {
            throw std::runtime_error("mlp: output layer must have a single unit");
        }
    }
};

template <class Scalar>
struct Gradients {
    std::vector<MatrixX<Scalar>> weights;
    std::vector<VectorX<Scalar>> biases;
};

namespace detail {

template <class Scalar>
MatrixX<Scalar> sigmoid(const MatrixX<Scalar>& z) {
    return (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
}

// forward pass over samples-as-columns; returns activations per layer,
// activations[0] being the input
template <class Scalar>
std::vector<MatrixX<Scalar>> forward(const Model<Scalar>& model, const MatrixX<Scalar>& inputs) {
    std::vector<MatrixX<Scalar>> activations;
    activations.reserve(model.weights.size() + 1);
    activations.push_back(inputs);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        MatrixX<Scalar> z = model.weights[l] * activations.back();
        z.colwise() += model.biases[l];
        activations.push_back(sigmoid<Scalar>(z));
    }
    return activations;
}

template <class Scalar>
Scalar target_of(ClassLabel label) {
    return label == ClassLabel::attack ? Scalar(1) : Scalar(0);
}

}  // namespace detail

template <class Scalar>
Model<Scalar> init_model(int input_dim, const Config<Scalar>& cfg, Rng& rng) {
    Model<Scalar> model;
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
    dims.push_back(1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l];
        const int fan_out = dims[l + 1];
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        MatrixX<Scalar> w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) {
                w(r, c) = static_cast<Scalar>(rng.uniform(-scale, scale));
            }
        }
        model.weights.push_back(std::move(w));
        model.biases.push_back(VectorX<Scalar>::Zero(fan_out));
    }
    return model;
}

// mean binary cross-entropy over the batch (rows of X are samples)
template <class Scalar>
Scalar loss(const Model<Scalar>& model, const MatrixX<Scalar>& X, const std::vector<ClassLabel>& y) {
    if (X.rows() != static_cast<Eigen::Index>(y.size())) {
        throw std::invalid_argument("mlp::loss: sample count mismatch");
    }
    const MatrixX<Scalar> inputs = X.transpose();
    const auto activations = detail::forward(model, inputs);
    const auto& out = activations.back();
    const Scalar eps = Scalar(1e-12);
    Scalar total = Scalar(0);
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
        const Scalar p = std::min(std::max(out(0, i), eps), Scalar(1) - eps);
        const Scalar t = detail::target_of<Scalar>(y[static_cast<std::size_t>(i)]);
        total += -(t * std::log(p) + (Scalar(1) - t) * std::log(Scalar(1) - p));
    }
    return total / static_cast<Scalar>(out.cols());
}

// analytic gradients of the mean cross-entropy (used by training and the
// finite-difference verification)
template <class Scalar>
Gradients<Scalar> loss_gradients(const Model<Scalar>& model, const MatrixX<Scalar>& X,
                                 const std::vector<ClassLabel>& y) {
    if (X.rows() != static_cast<Eigen::Index>(y.size())) {
        throw std::invalid_argument("mlp::loss_gradients: sample count mismatch");
    }
    const Eigen::Index n = X.rows();
    const MatrixX<Scalar> inputs = X.transpose();
    const auto activations = detail::forward(model, inputs);

    Gradients<Scalar> grads;
    grads.weights.resize(model.weights.size());
    grads.biases.resize(model.biases.size());

    // sigmoid + cross-entropy: output delta is (p - t) / n
    MatrixX<Scalar> delta(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        delta(0, i) = (activations.back()(0, i) -
                       detail::target_of<Scalar>(y[static_cast<std::size_t>(i)])) /
                      static_cast<Scalar>(n);
    }
    for (std::size_t l = model.weights.size(); l-- > 0;) {
        grads.weights[l] = delta * activations[l].transpose();
        grads.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            const auto& a = activations[l];
            delta = ((model.weights[l].transpose() * delta).array() * a.array() *
                     (Scalar(1) - a.array()))
                        .matrix();
        }
    }
    return grads;
}

// Mini-batch SGD on the mean cross-entropy. Deterministic for a fixed
// (data order, config); epoch_losses, when given, receives the mean loss
// over each epoch's batches.
template <class Scalar>
Model<Scalar> train(const MatrixX<Scalar>& X, const std::vector<ClassLabel>& y,
                    const Config<Scalar>& cfg, std::vector<double>* epoch_losses = nullptr) {
    cfg.validate();
    if (X.rows() == 0) throw std::invalid_argument("mlp::train: empty training set");
    if (X.rows() != static_cast<Eigen::Index>(y.size())) {
        throw std::invalid_argument("mlp::train: sample count mismatch");
    }

    Rng rng(cfg.seed);
    Model<Scalar> model = init_model(static_cast<int>(X.cols()), cfg, rng);

    const std::size_t n = y.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t count = std::min(static_cast<std::size_t>(cfg.batch_size), n - start);
            MatrixX<Scalar> bx(count, X.cols());
            std::vector<ClassLabel> by(count);
            for (std::size_t i = 0; i < count; ++i) {
                bx.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(order[start + i]));
                by[i] = y[order[start + i]];
            }
            const Gradients<Scalar> grads = loss_gradients(model, bx, by);
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                model.weights[l] -= cfg.learning_rate * grads.weights[l];
                model.biases[l] -= cfg.learning_rate * grads.biases[l];
            }
            epoch_loss += static_cast<double>(loss(model, bx, by));
            ++batches;
        }
        epoch_loss /= static_cast<double>(batches);
        if (!std::isfinite(epoch_loss) || !model.finite()) {
            throw TrainingError("mlp: training diverged to a non-finite state", epoch);
        }
        if (epoch_losses) epoch_losses->push_back(epoch_loss);
    }
    return model;
}

template <class Derived>
typename Derived::Scalar score(const Model<typename Derived::Scalar>& model,
                               const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    if (x.size() != model.input_dim()) {
        throw std::invalid_argument("mlp::score: input has " + std::to_string(x.size()) +
                                    " entries, model expects " + std::to_string(model.input_dim()));
    }
    MatrixX<Scalar> a = x;
    const auto activations = detail::forward(model, a);
    return activations.back()(0, 0);
}

// per-sample forward passes, so results are bit-identical with score() and
// independent of batch composition
template <class Scalar>
VectorX<Scalar> score_all(const Model<Scalar>& model, const MatrixX<Scalar>& X) {
    if (X.cols() != model.input_dim()) {
        throw std::invalid_argument("mlp::score_all: dimension mismatch");
    }
    VectorX<Scalar> scores(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        scores[i] = score(model, VectorX<Scalar>(X.row(i).transpose()));
    }
    return scores;
}

// attack iff score >= threshold; ties go to attack
template <class Derived>
ClassLabel decide(const Model<typename Derived::Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                  typename Derived::Scalar threshold = typename Derived::Scalar(0.5)) {
    using Scalar = typename Derived::Scalar;
    if (!(threshold > Scalar(0) && threshold < Scalar(1))) {
        throw std::invalid_argument("mlp::decide: threshold must lie in (0,1)");
    }
    return score(model, x) >= threshold ? ClassLabel::attack : ClassLabel::normal;
}

}  // namespace mlp

using MlpConfig = mlp::Config<double>;
using MlpModel = mlp::Model<double>;

}  // namespace netfuse
