#pragma once

#include <Eigen/Core>

namespace adcad {

/// Per-feature z-score fitted on training rows. Zero-spread features keep
/// sigma = 1 so they pass through centered rather than dividing by zero.
struct Standardizer {
    Eigen::VectorXd means;
    Eigen::VectorXd sigmas;

    static Standardizer fit(const Eigen::MatrixXd& X);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
    Eigen::Index dim() const { return means.size(); }
};

}  // namespace adcad
