#include "adcad/standardize.hpp"

#include <cmath>

#include "adcad/error.hpp"

namespace adcad {

Standardizer Standardizer::fit(const Eigen::MatrixXd& X) {
    require(X.rows() >= 1 && X.cols() >= 1, ErrorKind::InvalidArgument, "standardize: empty matrix");
    Standardizer s;
    s.means = X.colwise().mean().transpose();
    const double denom = X.rows() > 1 ? static_cast<double>(X.rows() - 1) : 1.0;
    s.sigmas = ((X.rowwise() - s.means.transpose()).colwise().squaredNorm() / denom).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < s.sigmas.size(); ++j)
        if (!(s.sigmas(j) > 0.0) || !std::isfinite(s.sigmas(j))) s.sigmas(j) = 1.0;
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
    require(X.cols() == dim(), ErrorKind::DimensionMismatch, "standardize: column count mismatch");
    return (X.rowwise() - means.transpose()) * sigmas.cwiseInverse().asDiagonal();
}

}  // namespace adcad
