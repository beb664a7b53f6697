#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adcad/error.hpp"
#include "adcad/manifest.hpp"
#include "adcad/volume.hpp"

namespace adcad {

enum class FeatureKind { GRAYSCALE, VAF };

std::string to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

struct BlockGrid {
    std::uint32_t bx = 4;
    std::uint32_t by = 4;
    std::uint32_t bz = 4;

    std::size_t count() const { return std::size_t{bx} * by * bz; }
    bool operator==(const BlockGrid&) const = default;
};

inline constexpr int kGrayscaleStats = 6;
inline constexpr int kDefaultBins = 32;

struct FeatureConfig {
    FeatureKind kind = FeatureKind::GRAYSCALE;
    BlockGrid block_grid{};
    int bins = kDefaultBins;

    void validate() const;
};

/// n x m sample matrix; row i belongs to subject_ids[i] / labels[i].
struct FeatureMatrix {
    Eigen::MatrixXd values;
    std::vector<Label> labels;
    std::vector<std::string> subject_ids;
    FeatureKind kind = FeatureKind::GRAYSCALE;
    BlockGrid block_grid{};

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

template <typename Scalar>
using GrayscaleStats = Eigen::Matrix<Scalar, kGrayscaleStats, 1>;

/// (mean, variance, skewness, kurtosis, energy, entropy) of a sample.
///
/// Moments are population moments; kurtosis is m4/m2^2 (not excess). When
/// m2 == 0 skewness and kurtosis are reported as 0. Energy and entropy
/// (base 2) come from a `bins`-bin equal-width histogram over [min, max];
/// a constant sample falls into a single bin.
template <typename Derived>
GrayscaleStats<typename Derived::Scalar> grayscale_features(const Eigen::DenseBase<Derived>& x,
                                                            int bins) {
    using Scalar = typename Derived::Scalar;
    require(x.size() > 0, ErrorKind::InvalidArgument, "grayscale_features: empty input");
    require(bins >= 1, ErrorKind::InvalidArgument, "grayscale_features: bins must be >= 1");

    const auto n = static_cast<Scalar>(x.size());
    const Scalar mean = x.derived().sum() / n;
    Scalar m2 = 0, m3 = 0, m4 = 0;
    Scalar lo = x.derived().coeff(0), hi = lo;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const Scalar v = x.derived().coeff(i);
        const Scalar d = v - mean, d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    Scalar skew = 0, kurt = 0;
    if (m2 > 0) {
        skew = m3 / std::pow(m2, Scalar(1.5));
        kurt = m4 / (m2 * m2);
    }

    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    if (hi > lo) {
        const Scalar range = hi - lo;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            auto k = static_cast<std::size_t>((x.derived().coeff(i) - lo) / range * bins);
            ++counts[std::min(k, counts.size() - 1)];
        }
    } else {
        counts[0] = static_cast<std::size_t>(x.size());
    }
    Scalar energy = 0, entropy = 0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const Scalar p = static_cast<Scalar>(c) / n;
        energy += p * p;
        entropy -= p * std::log2(p);
    }

    GrayscaleStats<Scalar> out;
    out << mean, m2, skew, kurt, energy, entropy;
    return out;
}

/// Six statistics per block of a bx*by*bz partition, blocks in x-fastest
/// order. Each axis is cut into b slabs of floor(n/b) voxels; the last slab
/// also takes the remainder.
Eigen::VectorXd block_features(const Volume& v, const BlockGrid& grid, int bins);

/// Voxels as features; identical to flatten().
Eigen::VectorXd vaf_features(const Volume& v);

Eigen::VectorXd extract_features(const Volume& v, const FeatureConfig& cfg);

/// Rows follow the order of `volumes`. All volumes must share dims.
FeatureMatrix build_feature_matrix(std::span<const Volume> volumes, std::span<const Label> labels,
                                   const FeatureConfig& cfg);
FeatureMatrix build_feature_matrix(const std::filesystem::path& manifest, const FeatureConfig& cfg);

/// CSV with header subject_id,label,f0..f{m-1}; values printed with %.17g.
void write_feature_csv(const FeatureMatrix& fm, const std::filesystem::path& path);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

}  // namespace adcad
