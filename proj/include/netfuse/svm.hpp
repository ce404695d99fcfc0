#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "netfuse/dataset.hpp"
#include "netfuse/mlp.hpp"  // TrainingError
#include "netfuse/rng.hpp"

namespace netfuse::svm {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
struct Config {
    Scalar lambda = Scalar(1e-4);
    int epochs = 20;
    std::uint64_t seed = 0;
    // clamp ||(w,b)|| to 1/sqrt(lambda) after every step
    bool project = false;

    void validate() const {
        if (!(lambda > Scalar(0))) throw std::invalid_argument("svm: lambda must be positive");
        if (epochs < 1) throw std::invalid_argument("svm: epochs must be at least 1");
    }
};

template <class Scalar>
struct Model {
    VectorX<Scalar> weights;
    Scalar bias = Scalar(0);
    double validation_pcc = 0.0;

    int input_dim() const { return static_cast<int>(weights.size()); }
};

namespace detail {

// labels enter the solver as -1 (normal) / +1 (attack)
template <class Scalar>
Scalar sign_of(ClassLabel label) {
    return label == ClassLabel::attack ? Scalar(1) : Scalar(-1);
}

}  // namespace detail

// Regularized objective (lambda/2)*(||w||^2 + b^2) + mean hinge loss. The
// bias rides along as an implicit constant-1 feature, so it shares the
// regularizer and the Pegasos step schedule stays well-behaved.
template <class Scalar>
Scalar objective(const VectorX<Scalar>& w, Scalar bias, Scalar lambda, const MatrixX<Scalar>& X,
                 const std::vector<ClassLabel>& y) {
    if (X.rows() != static_cast<Eigen::Index>(y.size()) || X.cols() != w.size()) {
        throw std::invalid_argument("svm::objective: dimension mismatch");
    }
    Scalar hinge = Scalar(0);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Scalar m = detail::sign_of<Scalar>(y[static_cast<std::size_t>(i)]) *
                         (X.row(i).dot(w) + bias);
        hinge += std::max(Scalar(0), Scalar(1) - m);
    }
    return lambda / Scalar(2) * (w.squaredNorm() + bias * bias) +
           hinge / static_cast<Scalar>(X.rows());
}

// gradient of the objective where it is differentiable (no sample exactly on
// the margin); returns (d/dw, d/db)
template <class Scalar>
std::pair<VectorX<Scalar>, Scalar> objective_gradient(const VectorX<Scalar>& w, Scalar bias,
                                                      Scalar lambda, const MatrixX<Scalar>& X,
                                                      const std::vector<ClassLabel>& y) {
    VectorX<Scalar> gw = lambda * w;
    Scalar gb = lambda * bias;
    const Scalar inv_n = Scalar(1) / static_cast<Scalar>(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Scalar s = detail::sign_of<Scalar>(y[static_cast<std::size_t>(i)]);
        if (s * (X.row(i).dot(w) + bias) < Scalar(1)) {
            gw -= inv_n * s * X.row(i).transpose();
            gb -= inv_n * s;
        }
    }
    return {std::move(gw), gb};
}

// Pegasos-style per-sample subgradient descent with step size 1/(lambda*t).
// objective_trace, when given, receives the full objective after every step
// (intended for small verification runs only).
template <class Scalar>
Model<Scalar> train(const MatrixX<Scalar>& X, const std::vector<ClassLabel>& y,
                    const Config<Scalar>& cfg, std::vector<double>* objective_trace = nullptr) {
    cfg.validate();
    if (X.rows() == 0) throw std::invalid_argument("svm::train: empty training set");
    if (X.rows() != static_cast<Eigen::Index>(y.size())) {
        throw std::invalid_argument("svm::train: sample count mismatch");
    }

    Model<Scalar> model;
    model.weights = VectorX<Scalar>::Zero(X.cols());

    Rng rng(cfg.seed);
    const std::size_t n = y.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    const Scalar radius = Scalar(1) / std::sqrt(cfg.lambda);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t k = 0; k < n; ++k) {
            ++t;
            const Eigen::Index i = static_cast<Eigen::Index>(order[k]);
            const Scalar eta = Scalar(1) / (cfg.lambda * static_cast<Scalar>(t));
            const Scalar s = detail::sign_of<Scalar>(y[order[k]]);
            const bool violates = s * (X.row(i).dot(model.weights) + model.bias) < Scalar(1);
            const Scalar shrink = Scalar(1) - eta * cfg.lambda;
            model.weights *= shrink;
            model.bias *= shrink;
            if (violates) {
                model.weights += eta * s * X.row(i).transpose();
                model.bias += eta * s;
            }
            if (cfg.project) {
                const Scalar norm =
                    std::sqrt(model.weights.squaredNorm() + model.bias * model.bias);
                if (norm > radius) {
                    model.weights *= radius / norm;
                    model.bias *= radius / norm;
                }
            }
            if (objective_trace) {
                objective_trace->push_back(
                    static_cast<double>(objective(model.weights, model.bias, cfg.lambda, X, y)));
            }
        }
        if (!model.weights.allFinite() || !std::isfinite(static_cast<double>(model.bias))) {
            throw TrainingError("svm: weights became non-finite", epoch);
        }
    }
    return model;
}

template <class Derived>
typename Derived::Scalar margin(const Model<typename Derived::Scalar>& model,
                                const Eigen::MatrixBase<Derived>& x) {
    if (x.size() != model.weights.size()) {
        throw std::invalid_argument("svm::margin: input has " + std::to_string(x.size()) +
                                    " entries, model expects " +
                                    std::to_string(model.weights.size()));
    }
    return model.weights.dot(x) + model.bias;
}

// attack iff the margin is non-negative
template <class Derived>
ClassLabel decide(const Model<typename Derived::Scalar>& model,
                  const Eigen::MatrixBase<Derived>& x) {
    return margin(model, x) >= typename Derived::Scalar(0) ? ClassLabel::attack
                                                           : ClassLabel::normal;
}

}  // namespace netfuse::svm

namespace netfuse {
using SvmConfig = svm::Config<double>;
using SvmModel = svm::Model<double>;
}  // namespace netfuse
