#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "adcad/error.hpp"
#include "adcad/manifest.hpp"
#include "adcad/pca.hpp"
#include "adcad/rng.hpp"

namespace adcad {

enum class Activation { TANSIG, RELU };
enum class Trainer { LM, GDM };

std::string to_string(Activation a);
std::string to_string(Trainer t);
Activation activation_from_string(const std::string& s);
Trainer trainer_from_string(const std::string& s);

/// Hyperbolic tangent sigmoid 2 / (1 + exp(-2n)) - 1, saturated to +-1
/// beyond |n| = 30 where the formula already rounds to +-1.
template <typename Scalar>
Scalar tansig(Scalar n) {
    if (n >= Scalar(30)) return Scalar(1);
    if (n <= Scalar(-30)) return Scalar(-1);
    return Scalar(2) / (Scalar(1) + std::exp(Scalar(-2) * n)) - Scalar(1);
}

template <typename Scalar>
Scalar activate(Activation a, Scalar z) {
    return a == Activation::TANSIG ? tansig(z) : std::max(z, Scalar(0));
}

/// Derivative expressed through the pre-activation z.
template <typename Scalar>
Scalar activate_derivative(Activation a, Scalar z) {
    if (a == Activation::RELU) return z > Scalar(0) ? Scalar(1) : Scalar(0);
    const Scalar t = tansig(z);
    return Scalar(1) - t * t;
}

/// One hidden layer, linear scalar output: y = w2 . act(w1 x + b1) + b2.
template <typename Scalar>
struct AnnModel {
    MatrixX<Scalar> w1;  // h x d
    VectorX<Scalar> b1;  // h
    VectorX<Scalar> w2;  // h
    Scalar b2 = 0;
    Activation activation = Activation::TANSIG;

    Eigen::Index inputs() const { return w1.cols(); }
    Eigen::Index hidden() const { return w1.rows(); }
    Eigen::Index parameter_count() const { return hidden() * inputs() + 2 * hidden() + 1; }

    /// Flat parameter vector: w1 (column-major), b1, w2, b2.
    VectorX<Scalar> parameters() const {
        VectorX<Scalar> theta(parameter_count());
        const Eigen::Index h = hidden(), hd = h * inputs();
        theta.head(hd) = Eigen::Map<const VectorX<Scalar>>(w1.data(), hd);
        theta.segment(hd, h) = b1;
        theta.segment(hd + h, h) = w2;
        theta(hd + 2 * h) = b2;
        return theta;
    }

    void set_parameters(const VectorX<Scalar>& theta) {
        require(theta.size() == parameter_count(), ErrorKind::DimensionMismatch, "ann: parameter size mismatch");
        const Eigen::Index h = hidden(), hd = h * inputs();
        Eigen::Map<VectorX<Scalar>>(w1.data(), hd) = theta.head(hd);
        b1 = theta.segment(hd, h);
        w2 = theta.segment(hd + h, h);
        b2 = theta(hd + 2 * h);
    }
};

struct TrainConfig {
    int max_iters = 1000;
    int hidden = 100;
    Trainer trainer = Trainer::LM;
    Activation activation = Activation::TANSIG;
    double mu0 = 1e-3;
    double mu_inc = 10.0;
    double mu_dec = 0.1;
    double mu_max = 1e10;
    double lr = 0.01;
    double momentum = 0.9;
    double goal_sse = 1e-6;
    std::uint64_t seed = 1;
    double lambda = 0.0;
    int patience = 6;  // validation early-stopping window

    void validate() const {
        require(max_iters >= 1, ErrorKind::InvalidArgument, "max_iters must be >= 1");
        require(hidden >= 1, ErrorKind::InvalidArgument, "hidden layer size must be >= 1");
        require(momentum >= 0.0 && momentum < 1.0, ErrorKind::InvalidArgument, "momentum must lie in [0, 1)");
        require(mu0 > 0.0 && mu_inc > 1.0 && mu_dec > 0.0 && mu_dec < 1.0 && mu_max >= mu0,
                ErrorKind::InvalidArgument, "invalid Levenberg-Marquardt damping schedule");
        require(lr >= 0.0, ErrorKind::InvalidArgument, "learning rate must be >= 0");
        require(lambda >= 0.0, ErrorKind::InvalidArgument, "lambda must be >= 0");
        require(goal_sse >= 0.0, ErrorKind::InvalidArgument, "goal_sse must be >= 0");
        require(patience >= 1, ErrorKind::InvalidArgument, "patience must be >= 1");
    }
};

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] from Rng(seed).
template <typename Scalar>
AnnModel<Scalar> init_model(Eigen::Index inputs, const TrainConfig& cfg) {
    require(inputs >= 1, ErrorKind::InvalidArgument, "ann: need at least one input");
    Rng rng(cfg.seed);
    AnnModel<Scalar> m;
    m.activation = cfg.activation;
    const Eigen::Index h = cfg.hidden;
    const double r1 = 1.0 / std::sqrt(static_cast<double>(inputs));
    const double r2 = 1.0 / std::sqrt(static_cast<double>(h));
    m.w1.resize(h, inputs);
    m.b1.resize(h);
    m.w2.resize(h);
    for (Eigen::Index k = 0; k < inputs; ++k)
        for (Eigen::Index j = 0; j < h; ++j) m.w1(j, k) = static_cast<Scalar>(rng.uniform(-r1, r1));
    for (Eigen::Index j = 0; j < h; ++j) m.b1(j) = static_cast<Scalar>(rng.uniform(-r1, r1));
    for (Eigen::Index j = 0; j < h; ++j) m.w2(j) = static_cast<Scalar>(rng.uniform(-r2, r2));
    m.b2 = static_cast<Scalar>(rng.uniform(-r2, r2));
    return m;
}

/// Network output for every row of X.
template <typename Scalar, typename Derived>
VectorX<Scalar> forward(const AnnModel<Scalar>& m, const Eigen::MatrixBase<Derived>& X) {
    require(X.cols() == m.inputs(), ErrorKind::DimensionMismatch,
            "ann forward: expected " + std::to_string(m.inputs()) + " inputs, got " + std::to_string(X.cols()));
    MatrixX<Scalar> Z = (X.template cast<Scalar>() * m.w1.transpose()).rowwise() + m.b1.transpose();
    Z = Z.unaryExpr([a = m.activation](Scalar z) { return activate(a, z); });
    return (Z * m.w2).array() + m.b2;
}

template <typename Scalar, typename Derived>
Scalar forward_one(const AnnModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    require(x.size() == m.inputs(), ErrorKind::DimensionMismatch, "ann forward: dimension mismatch");
    return forward(m, x.derived().transpose())(0);
}

/// d y_i / d theta for every sample (n x p), in parameters() order.
template <typename Scalar, typename Derived>
MatrixX<Scalar> output_jacobian(const AnnModel<Scalar>& m, const Eigen::MatrixBase<Derived>& X) {
    require(X.cols() == m.inputs(), ErrorKind::DimensionMismatch, "ann jacobian: dimension mismatch");
    const Eigen::Index n = X.rows(), h = m.hidden(), d = m.inputs();
    const MatrixX<Scalar> Z = (X.template cast<Scalar>() * m.w1.transpose()).rowwise() + m.b1.transpose();
    const auto act = m.activation;
    const MatrixX<Scalar> A = Z.unaryExpr([act](Scalar z) { return activate(act, z); });
    const MatrixX<Scalar> delta =
        Z.unaryExpr([act](Scalar z) { return activate_derivative(act, z); }) * m.w2.asDiagonal();

    MatrixX<Scalar> J(n, m.parameter_count());
    for (Eigen::Index k = 0; k < d; ++k)
        J.middleCols(h * k, h) = delta.array().colwise() * X.col(k).template cast<Scalar>().array();
    J.middleCols(h * d, h) = delta;
    J.middleCols(h * d + h, h) = A;
    J.col(h * d + 2 * h).setOnes();
    return J;
}

/// E = sum (y_i - t_i)^2 + lambda ||theta||^2.
template <typename Scalar, typename Derived>
Scalar sse(const AnnModel<Scalar>& m, const Eigen::MatrixBase<Derived>& X, const VectorX<Scalar>& t,
           double lambda = 0.0) {
    Scalar e = (forward(m, X) - t).squaredNorm();
    if (lambda > 0) e += Scalar(lambda) * m.parameters().squaredNorm();
    return e;
}

/// Analytic gradient of sse(): 2 J^T r + 2 lambda theta.
template <typename Scalar, typename Derived>
VectorX<Scalar> sse_gradient(const AnnModel<Scalar>& m, const Eigen::MatrixBase<Derived>& X,
                             const VectorX<Scalar>& t, double lambda = 0.0) {
    const VectorX<Scalar> r = forward(m, X) - t;
    VectorX<Scalar> g = Scalar(2) * output_jacobian(m, X).transpose() * r;
    if (lambda > 0) g += Scalar(2 * lambda) * m.parameters();
    return g;
}

enum class StopReason { MaxIters, Goal, MuMax, Validation };
std::string to_string(StopReason r);

template <typename Scalar>
struct TrainResult {
    AnnModel<Scalar> model;
    std::vector<double> sse_history;  // training SSE at start and after each iteration
    std::vector<double> val_history;  // validation SSE, when a validation set was given
    int iterations = 0;
    int best_iteration = 0;           // iteration whose parameters were returned
    StopReason stop = StopReason::MaxIters;
};

template <typename Scalar>
struct ValidationSet {
    MatrixX<Scalar> X;
    VectorX<Scalar> t;
};

namespace detail {

template <typename Scalar>
struct EarlyStopper {
    const ValidationSet<Scalar>* val;
    int patience;
    double best = std::numeric_limits<double>::infinity();
    VectorX<Scalar> best_theta;
    int best_iter = 0;
    int fails = 0;

    // Returns true when training should stop.
    bool observe(const AnnModel<Scalar>& m, int iter, TrainResult<Scalar>& res) {
        if (!val) return false;
        const double e = static_cast<double>(sse(m, val->X, val->t));
        res.val_history.push_back(e);
        if (e < best) {
            best = e;
            best_theta = m.parameters();
            best_iter = iter;
            fails = 0;
            return false;
        }
        return ++fails >= patience;
    }

    void finish(TrainResult<Scalar>& res) {
        if (val && best_theta.size() > 0) {
            res.model.set_parameters(best_theta);
            res.best_iteration = best_iter;
        } else {
            res.best_iteration = res.iterations;
        }
    }
};

template <typename Derived>
void check_training_inputs(const Eigen::MatrixBase<Derived>& X, Eigen::Index targets) {
    require(X.rows() >= 1, ErrorKind::InvalidArgument, "ann training: need at least one sample");
    require(X.rows() == targets, ErrorKind::DimensionMismatch, "ann training: sample/target count mismatch");
    require(X.allFinite(), ErrorKind::NonFinite, "ann training: non-finite input");
}

}  // namespace detail

/// Levenberg-Marquardt on the residuals r = y - t. Each trial step solves
/// (J^T J + (lambda + mu) I) delta = J^T r + lambda theta by Cholesky; when
/// the network has more parameters than samples the equivalent n x n system
/// (J J^T + nu I) is factored instead (Woodbury identity). A step that lowers
/// E is accepted and mu shrinks by mu_dec; otherwise mu grows by mu_inc and
/// the step is retried. With a validation set, training stops after
/// `patience` iterations without validation improvement and the best
/// validation parameters are returned.
template <typename Derived>
TrainResult<typename Derived::Scalar> train_lm(
    const Eigen::MatrixBase<Derived>& X, const VectorX<typename Derived::Scalar>& t, const TrainConfig& cfg,
    const ValidationSet<typename Derived::Scalar>* val = nullptr) {
    using Scalar = typename Derived::Scalar;
    cfg.validate();
    detail::check_training_inputs(X, t.size());

    TrainResult<Scalar> res;
    res.model = init_model<Scalar>(X.cols(), cfg);
    detail::EarlyStopper<Scalar> stopper{val, cfg.patience};

    const Eigen::Index n = X.rows();
    const Eigen::Index p = res.model.parameter_count();
    const Scalar lambda = static_cast<Scalar>(cfg.lambda);
    VectorX<Scalar> theta = res.model.parameters();
    Scalar E = sse(res.model, X, t, cfg.lambda);
    if (!std::isfinite(static_cast<double>(E)))
        throw Error(ErrorKind::NonFinite, "train_lm: non-finite loss at iteration 0");
    res.sse_history.push_back(static_cast<double>(E));
    stopper.observe(res.model, 0, res);

    double mu = cfg.mu0;
    AnnModel<Scalar> trial = res.model;
    while (true) {
        if (E <= Scalar(cfg.goal_sse)) {
            res.stop = StopReason::Goal;
            break;
        }
        if (res.iterations >= cfg.max_iters) {
            res.stop = StopReason::MaxIters;
            break;
        }

        const MatrixX<Scalar> J = output_jacobian(res.model, X);
        const VectorX<Scalar> r = forward(res.model, X) - t;
        VectorX<Scalar> g = J.transpose() * r;
        if (lambda > 0) g += lambda * theta;
        const bool primal = p <= n;
        MatrixX<Scalar> H;
        if (primal) {
            H = J.transpose() * J;
        } else {
            H = J * J.transpose();
        }
        const VectorX<Scalar> Jg = primal ? VectorX<Scalar>() : VectorX<Scalar>(J * g);

        bool accepted = false, any_solved = false;
        while (mu <= cfg.mu_max) {
            const Scalar nu = lambda + static_cast<Scalar>(mu);
            MatrixX<Scalar> A = H;
            A.diagonal().array() += nu;
            Eigen::LLT<MatrixX<Scalar>> llt(A);
            if (llt.info() == Eigen::Success) {
                any_solved = true;
                const VectorX<Scalar> step = primal ? VectorX<Scalar>(llt.solve(g))
                                                    : VectorX<Scalar>((g - J.transpose() * llt.solve(Jg)) / nu);
                trial.set_parameters(theta - step);
                const Scalar E_new = sse(trial, X, t, cfg.lambda);
                if (std::isfinite(static_cast<double>(E_new)) && E_new < E) {
                    theta -= step;
                    std::swap(res.model, trial);
                    E = E_new;
                    mu *= cfg.mu_dec;
                    accepted = true;
                    break;
                }
            }
            mu *= cfg.mu_inc;
        }
        if (!accepted) {
            if (!any_solved)
                throw Error(ErrorKind::NotConverged, "train_lm: normal equations singular up to mu_max at iteration " +
                                                         std::to_string(res.iterations + 1));
            res.stop = StopReason::MuMax;
            break;
        }
        ++res.iterations;
        res.sse_history.push_back(static_cast<double>(E));
        if (stopper.observe(res.model, res.iterations, res)) {
            res.stop = StopReason::Validation;
            break;
        }
    }
    stopper.finish(res);
    return res;
}

/// Full-batch gradient descent with momentum: v <- momentum v - lr grad E,
/// theta <- theta + v. Same termination rules as train_lm (except mu).
template <typename Derived>
TrainResult<typename Derived::Scalar> train_gdm(
    const Eigen::MatrixBase<Derived>& X, const VectorX<typename Derived::Scalar>& t, const TrainConfig& cfg,
    const ValidationSet<typename Derived::Scalar>* val = nullptr) {
    using Scalar = typename Derived::Scalar;
    cfg.validate();
    detail::check_training_inputs(X, t.size());

    TrainResult<Scalar> res;
    res.model = init_model<Scalar>(X.cols(), cfg);
    detail::EarlyStopper<Scalar> stopper{val, cfg.patience};

    VectorX<Scalar> theta = res.model.parameters();
    VectorX<Scalar> velocity = VectorX<Scalar>::Zero(theta.size());
    Scalar E = sse(res.model, X, t, cfg.lambda);
    res.sse_history.push_back(static_cast<double>(E));
    stopper.observe(res.model, 0, res);

    while (true) {
        if (E <= Scalar(cfg.goal_sse)) {
            res.stop = StopReason::Goal;
            break;
        }
        if (res.iterations >= cfg.max_iters) {
            res.stop = StopReason::MaxIters;
            break;
        }
        velocity = Scalar(cfg.momentum) * velocity - Scalar(cfg.lr) * sse_gradient(res.model, X, t, cfg.lambda);
        theta += velocity;
        res.model.set_parameters(theta);
        E = sse(res.model, X, t, cfg.lambda);
        ++res.iterations;
        res.sse_history.push_back(static_cast<double>(E));
        if (!std::isfinite(static_cast<double>(E)) || E > Scalar(1e12))
            throw Error(ErrorKind::Diverged, "train_gdm: loss diverged at iteration " + std::to_string(res.iterations) +
                                                 " with learning rate " + std::to_string(cfg.lr));
        if (stopper.observe(res.model, res.iterations, res)) {
            res.stop = StopReason::Validation;
            break;
        }
    }
    stopper.finish(res);
    return res;
}

template <typename Derived>
TrainResult<typename Derived::Scalar> train_ann(
    const Eigen::MatrixBase<Derived>& X, const VectorX<typename Derived::Scalar>& t, const TrainConfig& cfg,
    const ValidationSet<typename Derived::Scalar>* val = nullptr) {
    return cfg.trainer == Trainer::LM ? train_lm(X, t, cfg, val) : train_gdm(X, t, cfg, val);
}

}  // namespace adcad
