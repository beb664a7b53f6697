#include <doctest.h>

#include "adcad/error.hpp"
#include "adcad/linalg/jacobi.hpp"
#include "adcad/pca.hpp"
#include "oracles/eigen_bisection.hpp"
#include "support.hpp"

#include <cmath>

using namespace adcad;
using testing_support::random_int;
using testing_support::random_matrix;

namespace {

Eigen::MatrixXd random_symmetric(std::mt19937_64& gen, Eigen::Index m) {
    const Eigen::MatrixXd A = random_matrix(gen, m, m);
    return 0.5 * (A + A.transpose());
}

double max_abs(const Eigen::MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("pca") {

TEST_CASE("centering") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 2, 3, 4;
    const auto [Xc, means] = center(X);
    CHECK(means == Eigen::Vector2d(2, 3));
    Eigen::MatrixXd expect(2, 2);
    expect << -1, -1, 1, 1;
    CHECK(Xc == expect);

    const auto [single, m1] = center(Eigen::MatrixXd::Constant(1, 3, 4.5));
    CHECK(single.isZero(0));

    std::mt19937_64 gen(1);
    Eigen::MatrixXd Y = random_matrix(gen, 9, 4);
    Y = Y.rowwise() - Y.colwise().mean();
    CHECK(max_abs(center(Y).first - Y) < 1e-15);
}

TEST_CASE("covariance") {
    Eigen::MatrixXd Xc(2, 2);
    Xc << -1, -1, 1, 1;
    CHECK(covariance(Xc) == Eigen::Matrix2d::Constant(2.0));

    Eigen::MatrixXd orth(4, 2);
    orth << 1, 1, -1, 1, 1, -1, -1, -1;
    const Eigen::MatrixXd P = covariance(orth);
    CHECK(P(0, 1) == 0.0);
    CHECK(P(1, 0) == 0.0);

    std::mt19937_64 gen(2);
    for (int t = 0; t < 20; ++t) {
        const Eigen::MatrixXd Q = covariance(random_matrix(gen, random_int(gen, 2, 30), random_int(gen, 1, 12)));
        CHECK(Q == Q.transpose());
    }
}

TEST_CASE("small eigenproblems") {
    Eigen::Matrix2d D;
    D << 3, 0, 0, 1;
    auto e = linalg::eigen_symmetric(D);
    CHECK(e.values == Eigen::Vector2d(3, 1));
    CHECK(e.vectors == Eigen::Matrix2d::Identity());

    Eigen::Matrix2d R = Eigen::Matrix2d::Constant(2.0);
    e = linalg::eigen_symmetric(R);
    CHECK(e.values(0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(std::abs(e.values(1)) < 1e-14);
    CHECK(e.vectors(0, 0) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(e.vectors(1, 0) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));

    const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
    e = linalg::eigen_symmetric(I);
    CHECK(e.values == Eigen::Vector3d::Ones());
    CHECK(max_abs(e.vectors.transpose() * e.vectors - I) < 1e-14);
    CHECK(max_abs(I * e.vectors - e.vectors) < 1e-14);
}

TEST_CASE("jacobi rejects bad input") {
    Eigen::Matrix2d A;
    A << 1, 2, 3, 4;
    CHECK_THROWS_AS(linalg::eigen_symmetric(A), Error);
    CHECK_THROWS_AS(linalg::eigen_symmetric(Eigen::MatrixXd(2, 3)), Error);
    Eigen::Matrix2d B = Eigen::Matrix2d::Identity();
    B(0, 0) = std::nan("");
    CHECK_THROWS_AS(linalg::eigen_symmetric(B), Error);
}

TEST_CASE("eigenvalues agree with the bisection oracle") {
    std::mt19937_64 gen(7);
    for (int t = 0; t < 100; ++t) {
        const Eigen::MatrixXd A = random_symmetric(gen, random_int(gen, 1, 6));
        const auto e = linalg::eigen_symmetric(A);
        const auto ref = oracle::symmetric_eigenvalues(A);
        for (std::size_t k = 0; k < ref.size(); ++k)
            CHECK(std::abs(e.values(static_cast<Eigen::Index>(k)) - ref[k]) < 1e-9);
    }
}

TEST_CASE("spectral properties of random covariances") {
    std::mt19937_64 gen(11);
    for (int t = 0; t < 60; ++t) {
        const Eigen::MatrixXd X = random_matrix(gen, random_int(gen, 2, 40), random_int(gen, 1, 15));
        const Eigen::MatrixXd P = covariance(center(X).first);
        const auto e = linalg::eigen_symmetric(P);
        REQUIRE(e.converged);
        const Eigen::Index m = P.rows();

        // descending and sign-normalised
        for (Eigen::Index k = 1; k < m; ++k) CHECK(e.values(k - 1) >= e.values(k));
        for (Eigen::Index k = 0; k < m; ++k) {
            Eigen::Index arg;
            e.vectors.col(k).cwiseAbs().maxCoeff(&arg);
            CHECK(e.vectors(arg, k) > 0);
        }
        CHECK(max_abs(e.vectors * e.values.asDiagonal() * e.vectors.transpose() - P) <= 1e-7 * max_abs(P));
        CHECK(std::abs(e.values.sum() - P.trace()) <= 1e-9 * std::abs(P.trace()));
        CHECK(max_abs(e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(m, m)) < 1e-10);
    }
}

TEST_CASE("contribution rates and selection") {
    CHECK(contribution_rates(Eigen::Vector2d(4, 0)) == Eigen::Vector2d(1, 0));
    CHECK(contribution_rates(Eigen::Vector2d(3, 1)) == Eigen::Vector2d(0.75, 0.25));
    CHECK(contribution_rates(Eigen::Vector2d(2, 2)) == Eigen::Vector2d(0.5, 0.5));
    // tiny negative round-off is clamped
    const auto r = contribution_rates(Eigen::Vector3d(2, 1, -1e-17));
    CHECK(r(2) == 0.0);
    CHECK_THROWS_AS(contribution_rates(Eigen::Vector2d(0, 0)), Error);
    CHECK_THROWS_AS(contribution_rates(Eigen::Vector2d(1, -0.5)), Error);

    CHECK(select_components(Eigen::Vector2d(1, 0), 0.95) == 1);
    CHECK(select_components(Eigen::Vector2d(0.75, 0.25), 0.95) == 2);
    CHECK(select_components(Eigen::Vector3d(0.5, 0.5, 0), 1.0) == 2);
    CHECK(select_components(Eigen::Vector3d(0.6, 0.3, 0.1), 0.9) == 2);
}

TEST_CASE("fit and project the two-sample example") {
    Eigen::MatrixXd X(2, 2);
    X << 1, 2, 3, 4;
    const auto model = fit_pca(X, PcaConfig{0.95, false, PcaSolver::Direct});
    CHECK(model.means == Eigen::Vector2d(2, 3));
    CHECK(model.eigenvalues(0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(std::abs(model.eigenvalues(1)) < 1e-14);
    CHECK(model.retained == 1);
    const Eigen::MatrixXd Y = project(model, X);
    CHECK(Y.cols() == 1);
    CHECK(Y(0, 0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
    CHECK(Y(1, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(project(model, model.means.transpose()).isZero(1e-15));
}

TEST_CASE("degenerate data") {
    CHECK_THROWS_AS(fit_pca(Eigen::MatrixXd::Constant(5, 3, 1.5)), Error);
    try {
        fit_pca(Eigen::MatrixXd::Constant(5, 3, 1.5));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AllZeroSpectrum);
    }
    try {
        fit_pca(Eigen::MatrixXd::Constant(3, 8, 1.5));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AllZeroSpectrum);
    }
    CHECK_THROWS_AS(fit_pca(Eigen::MatrixXd::Ones(1, 3)), Error);
    CHECK_THROWS_AS(fit_pca(Eigen::MatrixXd::Random(4, 3), PcaConfig{1.5}), Error);
}

TEST_CASE("one-dimensional data gives one dominant component") {
    std::mt19937_64 gen(13);
    const Eigen::VectorXd dir = random_matrix(gen, 6, 1).normalized();
    const Eigen::VectorXd coef = random_matrix(gen, 50, 1, -3, 3);
    const Eigen::MatrixXd X = coef * dir.transpose() + 1e-6 * random_matrix(gen, 50, 6);
    const auto model = fit_pca(X);
    CHECK(model.contribution(0) > 1.0 - 1e-9);
    CHECK(model.retained == 1);
    CHECK(std::abs(std::abs(model.components.col(0).dot(dir)) - 1.0) < 1e-8);
}

TEST_CASE("projection variance equals eigenvalues") {
    std::mt19937_64 gen(19);
    for (int t = 0; t < 30; ++t) {
        const Eigen::MatrixXd X = random_matrix(gen, random_int(gen, 5, 40), random_int(gen, 1, 10));
        if (X.cols() >= X.rows()) continue;
        const auto model = fit_pca(X, PcaConfig{1.0});
        const Eigen::MatrixXd Y = project(model, X);
        for (Eigen::Index i = 0; i < Y.cols(); ++i) {
            const double var = (Y.col(i).array() - Y.col(i).mean()).square().sum() / (Y.rows() - 1);
            CHECK(std::abs(var - model.eigenvalues(i)) <= 1e-8 * model.eigenvalues(0));
        }
    }
}

TEST_CASE("full projection is an isometry") {
    std::mt19937_64 gen(29);
    const Eigen::MatrixXd X = random_matrix(gen, 20, 5);
    auto model = fit_pca(X, PcaConfig{1.0});
    model.retained = model.components.cols();
    const Eigen::MatrixXd Y = project(model, X);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = i + 1; j < X.rows(); ++j)
            CHECK((Y.row(i) - Y.row(j)).norm() == doctest::Approx((X.row(i) - X.row(j)).norm()).epsilon(1e-12));
}

TEST_CASE("gram and direct solvers agree") {
    std::mt19937_64 gen(31);
    for (int t = 0; t < 10; ++t) {
        const Eigen::MatrixXd X = random_matrix(gen, 12, 30);
        const auto direct = fit_pca(X, PcaConfig{0.95, false, PcaSolver::Direct});
        const auto gram = fit_pca(X, PcaConfig{0.95, false, PcaSolver::Gram});
        const auto automatic = fit_pca(X);
        REQUIRE(gram.eigenvalues.size() == 11);
        CHECK(automatic.components.cols() == 11);
        CHECK(max_abs(direct.eigenvalues.head(11) - gram.eigenvalues) < 1e-10);
        CHECK(direct.retained == gram.retained);
        CHECK(max_abs(project(direct, X) - project(gram, X)) < 1e-9);
    }
}

TEST_CASE("unit-variance scaling") {
    std::mt19937_64 gen(37);
    Eigen::MatrixXd X = random_matrix(gen, 30, 3);
    X.col(1) *= 1000.0;
    const auto scaled = fit_pca(X, PcaConfig{1.0, true});
    CHECK(scaled.scales.size() == 3);
    // correlation matrix has trace m
    CHECK(scaled.eigenvalues.sum() == doctest::Approx(3.0).epsilon(1e-12));
    const auto plain = fit_pca(X, PcaConfig{0.95});
    CHECK(plain.retained == 1);
}

TEST_CASE("float scalar path") {
    std::mt19937_64 gen(41);
    const Eigen::MatrixXf X = random_matrix(gen, 20, 4).cast<float>();
    const auto model = fit_pca(X, PcaConfig{1.0});
    const auto ref = fit_pca(X.cast<double>().eval(), PcaConfig{1.0});
    for (Eigen::Index k = 0; k < 4; ++k) CHECK(model.eigenvalues(k) == doctest::Approx(ref.eigenvalues(k)).epsilon(1e-4));
}

}
