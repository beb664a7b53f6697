#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adcad/error.hpp"
#include "adcad/manifest.hpp"
#include "adcad/pca.hpp"

namespace adcad {

enum class KernelKind { LINEAR, GAUSSIAN };

std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

/// GAUSSIAN is exp(-||x - z||^2 / scale^2), i.e. the inputs are divided by
/// `scale` before a unit-width RBF.
struct KernelSpec {
    KernelKind kind = KernelKind::GAUSSIAN;
    double scale = 2.8;

    void validate() const {
        require(kind == KernelKind::LINEAR || (std::isfinite(scale) && scale > 0.0),
                ErrorKind::InvalidArgument, "Gaussian kernel scale must be > 0");
    }
};

template <typename DerivedX, typename DerivedZ>
typename DerivedX::Scalar kernel_eval(const KernelSpec& k, const Eigen::MatrixBase<DerivedX>& x,
                                      const Eigen::MatrixBase<DerivedZ>& z) {
    using Scalar = typename DerivedX::Scalar;
    require(x.size() == z.size(), ErrorKind::DimensionMismatch, "kernel_eval: dimension mismatch");
    if (k.kind == KernelKind::LINEAR) return x.cwiseProduct(z).sum();
    const Scalar s = static_cast<Scalar>(k.scale);
    return std::exp(-(x - z).squaredNorm() / (s * s));
}

/// K(i, j) = k(A.row(i), B.row(j)).
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> kernel_matrix(const KernelSpec& k, const Eigen::MatrixBase<DerivedA>& A,
                                                 const Eigen::MatrixBase<DerivedB>& B) {
    using Scalar = typename DerivedA::Scalar;
    require(A.cols() == B.cols(), ErrorKind::DimensionMismatch, "kernel_matrix: dimension mismatch");
    MatrixX<Scalar> K = A * B.transpose();
    if (k.kind == KernelKind::LINEAR) return K;
    const Scalar s2 = static_cast<Scalar>(k.scale * k.scale);
    const VectorX<Scalar> a2 = A.rowwise().squaredNorm();
    const VectorX<Scalar> b2 = B.rowwise().squaredNorm();
    for (Eigen::Index j = 0; j < K.cols(); ++j)
        for (Eigen::Index i = 0; i < K.rows(); ++i) {
            const Scalar d2 = std::max(Scalar(0), a2(i) + b2(j) - Scalar(2) * K(i, j));
            K(i, j) = std::exp(-d2 / s2);
        }
    return K;
}

struct SmoOptions {
    double tol = 1e-3;
    double passes = 100;  // iteration cap is passes * n * n pair updates
};

template <typename Scalar>
struct DualSolution {
    VectorX<Scalar> alphas;
    Scalar bias = 0;
    long iterations = 0;
    Scalar max_violation = 0;  // final maximal-violating-pair gap
};

/// 1^T a - 1/2 a^T Q a with Q_ij = y_i y_j K_ij.
template <typename Scalar>
Scalar dual_objective(const MatrixX<Scalar>& K, const VectorX<Scalar>& y, const VectorX<Scalar>& alpha) {
    const VectorX<Scalar> ay = alpha.cwiseProduct(y);
    return alpha.sum() - Scalar(0.5) * ay.dot(K * ay);
}

/// SMO on a precomputed kernel matrix. Working pairs are the maximal
/// violating pair of the first-order KKT conditions; the solver stops when
/// the pair's gap drops to tol, which bounds every KKT violation of
/// y_i f(x_i) by tol.
template <typename Scalar>
DualSolution<Scalar> solve_dual_kernel(const MatrixX<Scalar>& K, const VectorX<Scalar>& y, double C,
                                       const SmoOptions& opt = {}) {
    const Eigen::Index n = y.size();
    require(K.rows() == n && K.cols() == n, ErrorKind::DimensionMismatch, "solve_dual: kernel/label size mismatch");
    require(n >= 2, ErrorKind::InvalidArgument, "solve_dual: need at least 2 samples");
    require(std::isfinite(C) && C > 0.0, ErrorKind::InvalidArgument, "solve_dual: C must be > 0");
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        require(y(i) == Scalar(1) || y(i) == Scalar(-1), ErrorKind::InvalidArgument, "solve_dual: labels must be +1/-1");
        (y(i) > 0 ? has_pos : has_neg) = true;
    }
    require(has_pos && has_neg, ErrorKind::SingleClass, "solve_dual: both classes must be present");

    const Scalar c = static_cast<Scalar>(C);
    constexpr Scalar kTau = Scalar(1e-12);
    VectorX<Scalar> alpha = VectorX<Scalar>::Zero(n);
    VectorX<Scalar> grad = VectorX<Scalar>::Constant(n, Scalar(-1));  // Q alpha - 1
    const auto Q = [&](Eigen::Index i, Eigen::Index j) { return y(i) * y(j) * K(i, j); };
    const auto in_up = [&](Eigen::Index t) { return (y(t) > 0 && alpha(t) < c) || (y(t) < 0 && alpha(t) > 0); };
    const auto in_low = [&](Eigen::Index t) { return (y(t) < 0 && alpha(t) < c) || (y(t) > 0 && alpha(t) > 0); };

    DualSolution<Scalar> out;
    const long max_iter = static_cast<long>(opt.passes * static_cast<double>(n) * static_cast<double>(n));
    for (;;) {
        Eigen::Index i = -1, j = -1;
        Scalar g_max = -std::numeric_limits<Scalar>::infinity();
        Scalar g_min = std::numeric_limits<Scalar>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            const Scalar v = -y(t) * grad(t);
            if (in_up(t) && v > g_max) g_max = v, i = t;
            if (in_low(t) && v < g_min) g_min = v, j = t;
        }
        out.max_violation = (i < 0 || j < 0) ? Scalar(0) : g_max - g_min;
        if (i < 0 || j < 0 || out.max_violation <= Scalar(opt.tol)) break;
        if (out.iterations >= max_iter)
            throw Error(ErrorKind::NotConverged, "solve_dual: iteration budget exhausted with KKT violation " +
                                                     std::to_string(static_cast<double>(out.max_violation)));
        ++out.iterations;

        const Scalar ai = alpha(i), aj = alpha(j);
        if (y(i) != y(j)) {
            Scalar quad = Q(i, i) + Q(j, j) + Scalar(2) * Q(i, j);
            if (quad <= 0) quad = kTau;
            const Scalar delta = (-grad(i) - grad(j)) / quad;
            const Scalar diff = ai - aj;
            alpha(i) += delta;
            alpha(j) += delta;
            if (diff > 0) {
                if (alpha(j) < 0) alpha(j) = 0, alpha(i) = diff;
            } else {
                if (alpha(i) < 0) alpha(i) = 0, alpha(j) = -diff;
            }
            if (diff > 0) {
                if (alpha(i) > c) alpha(i) = c, alpha(j) = c - diff;
            } else {
                if (alpha(j) > c) alpha(j) = c, alpha(i) = c + diff;
            }
        } else {
            Scalar quad = Q(i, i) + Q(j, j) - Scalar(2) * Q(i, j);
            if (quad <= 0) quad = kTau;
            const Scalar delta = (grad(i) - grad(j)) / quad;
            const Scalar sum = ai + aj;
            alpha(i) -= delta;
            alpha(j) += delta;
            if (sum > c) {
                if (alpha(i) > c) alpha(i) = c, alpha(j) = sum - c;
            } else {
                if (alpha(j) < 0) alpha(j) = 0, alpha(i) = sum;
            }
            if (sum > c) {
                if (alpha(j) > c) alpha(j) = c, alpha(i) = sum - c;
            } else {
                if (alpha(i) < 0) alpha(i) = 0, alpha(j) = sum;
            }
        }

        const Scalar di = alpha(i) - ai, dj = alpha(j) - aj;
        for (Eigen::Index t = 0; t < n; ++t) grad(t) += Q(t, i) * di + Q(t, j) * dj;
    }

    // v_i = y_i - sum_j alpha_j y_j K_ij; free vectors pin b = v_i.
    std::vector<Scalar> free_v;
    Scalar lower = -std::numeric_limits<Scalar>::infinity();
    Scalar upper = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
        const Scalar v = -y(t) * grad(t);
        if (alpha(t) > 0 && alpha(t) < c) {
            free_v.push_back(v);
        } else if ((alpha(t) == 0) == (y(t) > 0)) {
            lower = std::max(lower, v);
        } else {
            upper = std::min(upper, v);
        }
    }
    if (!free_v.empty()) {
        std::sort(free_v.begin(), free_v.end());
        const std::size_t h = free_v.size() / 2;
        out.bias = free_v.size() % 2 ? free_v[h] : (free_v[h - 1] + free_v[h]) / Scalar(2);
    } else if (std::isfinite(lower) && std::isfinite(upper)) {
        out.bias = (lower + upper) / Scalar(2);
    } else {
        out.bias = std::isfinite(lower) ? lower : upper;
    }
    out.alphas = std::move(alpha);
    return out;
}

template <typename Derived>
DualSolution<typename Derived::Scalar> solve_dual(const Eigen::MatrixBase<Derived>& X,
                                                  const VectorX<typename Derived::Scalar>& y, double C,
                                                  const KernelSpec& k, const SmoOptions& opt = {}) {
    k.validate();
    require(X.rows() == y.size(), ErrorKind::DimensionMismatch, "solve_dual: sample/label count mismatch");
    return solve_dual_kernel(kernel_matrix(k, X, X), y, C, opt);
}

/// Support coefficients below this are dropped from a trained model.
inline constexpr double kSupportEps = 1e-8;

template <typename Scalar>
struct SvmModel {
    MatrixX<Scalar> support_vectors;  // one row per support vector
    VectorX<Scalar> alphas;
    VectorX<Scalar> labels;           // +1 (AD) / -1 (HC)
    Scalar bias = 0;
    KernelSpec kernel;
    double C = 1.0;

    Eigen::Index dim() const { return support_vectors.cols(); }
};

struct SvmConfig {
    KernelSpec kernel{};
    double C = 1.0;
    double tol = 1e-3;

    void validate() const {
        kernel.validate();
        require(std::isfinite(C) && C > 0.0, ErrorKind::InvalidArgument, "box constraint C must be > 0");
        require(tol > 0.0, ErrorKind::InvalidArgument, "SMO tolerance must be > 0");
    }
};

template <typename Derived>
SvmModel<typename Derived::Scalar> train_svm(const Eigen::MatrixBase<Derived>& X,
                                             const VectorX<typename Derived::Scalar>& y, const SvmConfig& cfg) {
    using Scalar = typename Derived::Scalar;
    cfg.validate();
    const auto sol = solve_dual(X, y, cfg.C, cfg.kernel, SmoOptions{cfg.tol});

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < sol.alphas.size(); ++i)
        if (sol.alphas(i) > Scalar(kSupportEps)) keep.push_back(i);

    SvmModel<Scalar> m;
    m.kernel = cfg.kernel;
    m.C = cfg.C;
    m.bias = sol.bias;
    const auto ns = static_cast<Eigen::Index>(keep.size());
    m.support_vectors.resize(ns, X.cols());
    m.alphas.resize(ns);
    m.labels.resize(ns);
    for (Eigen::Index s = 0; s < ns; ++s) {
        const Eigen::Index i = keep[static_cast<std::size_t>(s)];
        m.support_vectors.row(s) = X.row(i);
        m.alphas(s) = sol.alphas(i);
        m.labels(s) = y(i);
    }
    return m;
}

/// f(x) = sum_i alpha_i y_i k(x, x_i) + b for every row of X.
template <typename Scalar, typename Derived>
VectorX<Scalar> decision(const SvmModel<Scalar>& m, const Eigen::MatrixBase<Derived>& X) {
    require(m.alphas.size() == 0 || X.cols() == m.dim(), ErrorKind::DimensionMismatch,
            "svm decision: expected " + std::to_string(m.dim()) + " features, got " + std::to_string(X.cols()));
    if (m.alphas.size() == 0) return VectorX<Scalar>::Constant(X.rows(), m.bias);
    const VectorX<Scalar> coef = m.alphas.cwiseProduct(m.labels);
    return (kernel_matrix(m.kernel, X.template cast<Scalar>(), m.support_vectors) * coef).array() + m.bias;
}

/// Single-sample form of decision().
template <typename Scalar, typename Derived>
Scalar decision_value(const SvmModel<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    Scalar f = m.bias;
    if (m.alphas.size() == 0) return f;
    require(x.size() == m.dim(), ErrorKind::DimensionMismatch, "svm decision: dimension mismatch");
    for (Eigen::Index i = 0; i < m.alphas.size(); ++i)
        f += m.alphas(i) * m.labels(i) * kernel_eval(m.kernel, x.derived().template cast<Scalar>().transpose(),
                                                     m.support_vectors.row(i));
    return f;
}

}  // namespace adcad
