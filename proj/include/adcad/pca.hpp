#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Core>

#include "adcad/error.hpp"
#include "adcad/linalg/jacobi.hpp"

namespace adcad {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// How fit_pca obtains the spectrum. Auto picks Gram when m > n.
enum class PcaSolver { Auto, Direct, Gram };

struct PcaConfig {
    double cum_threshold = 0.95;
    bool scale_features = false;  // divide centered columns by their standard deviation
    PcaSolver solver = PcaSolver::Auto;

    void validate() const {
        require(cum_threshold > 0.0 && cum_threshold <= 1.0, ErrorKind::InvalidArgument,
                "PCA cumulative threshold must lie in (0, 1]");
    }
};

/// Fitted PCA. `components` is m x r with orthonormal columns; r == m for
/// the direct solver and r == rank for the Gram solver (the omitted
/// eigenvalues are exactly zero). `scales` is empty unless features were
/// scaled to unit variance before the covariance was formed.
template <typename Scalar>
struct PcaModel {
    VectorX<Scalar> means;
    VectorX<Scalar> scales;
    VectorX<Scalar> eigenvalues;
    MatrixX<Scalar> components;
    Eigen::Index retained = 0;
    VectorX<Scalar> contribution;

    Eigen::Index dim() const { return means.size(); }
};

template <typename Derived>
std::pair<MatrixX<typename Derived::Scalar>, VectorX<typename Derived::Scalar>> center(
    const Eigen::MatrixBase<Derived>& X) {
    require(X.rows() >= 1 && X.cols() >= 1, ErrorKind::InvalidArgument, "center: empty matrix");
    VectorX<typename Derived::Scalar> means = X.colwise().mean().transpose();
    MatrixX<typename Derived::Scalar> Xc = X.rowwise() - means.transpose();
    return {std::move(Xc), std::move(means)};
}

/// Xc^T Xc / (n - 1), lower triangle mirrored so the result is exactly symmetric.
template <typename Derived>
MatrixX<typename Derived::Scalar> covariance(const Eigen::MatrixBase<Derived>& Xc) {
    using Scalar = typename Derived::Scalar;
    require(Xc.rows() >= 2, ErrorKind::InvalidArgument, "covariance: need at least 2 samples");
    MatrixX<Scalar> P = (Xc.transpose() * Xc) / Scalar(Xc.rows() - 1);
    P.template triangularView<Eigen::StrictlyUpper>() = P.transpose();
    return P;
}

/// lambda_g / sum(lambda). Eigenvalues down to -1e-9 * max|lambda| are
/// treated as round-off and clamped to zero.
template <typename Derived>
VectorX<typename Derived::Scalar> contribution_rates(const Eigen::MatrixBase<Derived>& eigenvalues) {
    using Scalar = typename Derived::Scalar;
    require(eigenvalues.size() >= 1, ErrorKind::InvalidArgument, "contribution_rates: empty spectrum");
    const Scalar eps = Scalar(1e-9) * eigenvalues.cwiseAbs().maxCoeff();
    require(eigenvalues.minCoeff() >= -eps, ErrorKind::InvalidArgument,
            "contribution_rates: negative eigenvalue beyond round-off");
    VectorX<Scalar> clamped = eigenvalues.cwiseMax(Scalar(0));
    const Scalar total = clamped.sum();
    require(total > Scalar(0), ErrorKind::AllZeroSpectrum, "contribution_rates: all-zero spectrum");
    return clamped / total;
}

/// Smallest k >= 1 whose leading cumulative rate reaches cum_threshold.
/// A 1e-12 slack absorbs rounding in the running sum so a threshold of 1
/// is reachable.
template <typename Derived>
Eigen::Index select_components(const Eigen::MatrixBase<Derived>& rates, double cum_threshold) {
    require(cum_threshold > 0.0 && cum_threshold <= 1.0, ErrorKind::InvalidArgument,
            "select_components: threshold must lie in (0, 1]");
    double cum = 0.0;
    for (Eigen::Index k = 0; k < rates.size(); ++k) {
        cum += static_cast<double>(rates(k));
        if (cum + 1e-12 >= cum_threshold) return k + 1;
    }
    return rates.size();
}

namespace detail {

template <typename Scalar>
void fit_direct(const MatrixX<Scalar>& Xc, PcaModel<Scalar>& model) {
    auto eig = linalg::eigen_symmetric(covariance(Xc));
    model.eigenvalues = std::move(eig.values);
    model.components = std::move(eig.vectors);
}

// Nonzero spectrum of Xc^T Xc/(n-1) from the n x n Gram matrix
// Xc Xc^T/(n-1): each eigenvector u maps to Xc^T u / ||Xc^T u||.
template <typename Scalar>
void fit_gram(const MatrixX<Scalar>& Xc, PcaModel<Scalar>& model) {
    const Eigen::Index n = Xc.rows();
    MatrixX<Scalar> G = (Xc * Xc.transpose()) / Scalar(n - 1);
    G.template triangularView<Eigen::StrictlyUpper>() = G.transpose();
    auto eig = linalg::eigen_symmetric(G);

    const Scalar floor = Scalar(1e-10) * std::max(eig.values.cwiseAbs().maxCoeff(), Scalar(0));
    Eigen::Index rank = 0;
    while (rank < n && eig.values(rank) > floor) ++rank;
    require(rank > 0, ErrorKind::AllZeroSpectrum, "fit_pca: all-zero spectrum");

    model.eigenvalues = eig.values.head(rank);
    model.components = Xc.transpose() * eig.vectors.leftCols(rank);
    for (Eigen::Index j = 0; j < rank; ++j) model.components.col(j).normalize();
    linalg::fix_eigenvector_signs(model.components);
}

}  // namespace detail

/// Center (optionally scale), form the covariance, eigendecompose, rank by
/// contribution rate and keep the leading components reaching cum_threshold.
template <typename Derived>
PcaModel<typename Derived::Scalar> fit_pca(const Eigen::MatrixBase<Derived>& X, const PcaConfig& cfg = {}) {
    using Scalar = typename Derived::Scalar;
    cfg.validate();
    require(X.rows() >= 2, ErrorKind::InvalidArgument, "fit_pca: need at least 2 samples");

    PcaModel<Scalar> model;
    auto [Xc, means] = center(X);
    model.means = std::move(means);
    if (cfg.scale_features) {
        model.scales = (Xc.colwise().squaredNorm() / Scalar(Xc.rows() - 1)).cwiseSqrt().transpose();
        for (Eigen::Index j = 0; j < model.scales.size(); ++j)
            if (!(model.scales(j) > Scalar(0))) model.scales(j) = Scalar(1);
        Xc = Xc * model.scales.cwiseInverse().asDiagonal();
    }

    const bool gram = cfg.solver == PcaSolver::Gram || (cfg.solver == PcaSolver::Auto && X.cols() > X.rows());
    if (gram)
        detail::fit_gram(Xc, model);
    else
        detail::fit_direct(Xc, model);

    model.contribution = contribution_rates(model.eigenvalues);
    model.retained = select_components(model.contribution, cfg.cum_threshold);
    return model;
}

/// Y = (X - means) [e_1 ... e_retained], after unit-variance scaling when
/// the model was fitted with it.
template <typename Scalar, typename Derived>
MatrixX<Scalar> project(const PcaModel<Scalar>& model, const Eigen::MatrixBase<Derived>& X) {
    require(X.cols() == model.dim(), ErrorKind::DimensionMismatch,
            "project: expected " + std::to_string(model.dim()) + " columns, got " + std::to_string(X.cols()));
    MatrixX<Scalar> Xc = X.template cast<Scalar>().rowwise() - model.means.transpose();
    if (model.scales.size() > 0) Xc = Xc * model.scales.cwiseInverse().asDiagonal();
    return Xc * model.components.leftCols(model.retained);
}

}  // namespace adcad
