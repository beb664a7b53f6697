#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "adcad/error.hpp"

namespace adcad::linalg {

template <typename Scalar>
struct SymmetricEigen {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;                // non-increasing
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // column i pairs with values[i]
    int sweeps = 0;
    bool converged = false;
};

struct JacobiOptions {
    int max_sweeps = 100;
    double rel_tol = 1e-12;       // stop when off(A) <= rel_tol * ||P||_F
    double symmetry_tol = 1e-10;  // input must satisfy |P - P^T| <= symmetry_tol * max|P|
};

/// Flips each column so its largest-magnitude entry is positive (first such
/// entry on ties).
template <typename Derived>
void fix_eigenvector_signs(Eigen::MatrixBase<Derived>& vectors) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        Eigen::Index arg = 0;
        auto best = std::abs(vectors(0, j));
        for (Eigen::Index i = 1; i < vectors.rows(); ++i) {
            if (std::abs(vectors(i, j)) > best) {
                best = std::abs(vectors(i, j));
                arg = i;
            }
        }
        if (vectors(arg, j) < 0) vectors.col(j) *= -1;
    }
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Each sweep visits every (p, q) pair above the diagonal once and
/// annihilates a(p, q) with a rotation chosen by the smaller-angle rule
/// t = sgn(theta) / (|theta| + sqrt(theta^2 + 1)). Sweeps continue until
/// the off-diagonal Frobenius norm drops below rel_tol * ||P||_F or
/// max_sweeps is reached. Results are sorted non-increasing and signs fixed
/// with fix_eigenvector_signs.
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> eigen_symmetric(const Eigen::MatrixBase<Derived>& P,
                                                         const JacobiOptions& opt = {}) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using std::abs;
    using std::sqrt;

    require(P.rows() == P.cols(), ErrorKind::DimensionMismatch, "eigen_symmetric: matrix not square");
    const Eigen::Index m = P.rows();
    require(m >= 1, ErrorKind::InvalidArgument, "eigen_symmetric: empty matrix");

    const Scalar max_abs = P.cwiseAbs().maxCoeff();
    const Scalar asym = (P - P.transpose()).cwiseAbs().maxCoeff();
    require(asym <= Scalar(opt.symmetry_tol) * max_abs, ErrorKind::InvalidArgument,
            "eigen_symmetric: input is not symmetric");

    Matrix A = (P + P.transpose()) / Scalar(2);
    Matrix V = Matrix::Identity(m, m);

    const Scalar norm = A.norm();
    const auto off_norm = [&] {
        Scalar s = 0;
        for (Eigen::Index j = 0; j < m; ++j)
            for (Eigen::Index i = 0; i < j; ++i) s += A(i, j) * A(i, j);
        return sqrt(Scalar(2) * s);
    };

    SymmetricEigen<Scalar> out;
    const Scalar target = Scalar(opt.rel_tol) * norm;
    out.converged = off_norm() <= target;
    while (!out.converged && out.sweeps < opt.max_sweeps) {
        for (Eigen::Index p = 0; p + 1 < m; ++p) {
            for (Eigen::Index q = p + 1; q < m; ++q) {
                const Scalar apq = A(p, q);
                if (apq == Scalar(0)) continue;
                const Scalar app = A(p, p), aqq = A(q, q);
                const Scalar theta = (aqq - app) / (Scalar(2) * apq);
                Scalar t = Scalar(1) / (abs(theta) + sqrt(theta * theta + Scalar(1)));
                if (theta < 0) t = -t;
                const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
                const Scalar s = t * c;

                // A <- J^T A J touches only rows/columns p and q.
                for (Eigen::Index k = 0; k < m; ++k) {
                    const Scalar akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < m; ++k) {
                    A(p, k) = A(k, p);
                    A(q, k) = A(k, q);
                }
                A(p, p) = app - t * apq;
                A(q, q) = aqq + t * apq;
                A(p, q) = A(q, p) = Scalar(0);

                for (Eigen::Index k = 0; k < m; ++k) {
                    const Scalar vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
        ++out.sweeps;
        out.converged = off_norm() <= target;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return A(a, a) > A(b, b); });

    out.values.resize(m);
    out.vectors.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        out.values(i) = A(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = V.col(order[static_cast<std::size_t>(i)]);
    }
    fix_eigenvector_signs(out.vectors);
    return out;
}

}  // namespace adcad::linalg
