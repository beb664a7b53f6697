#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "adcad/manifest.hpp"
#include "adcad/volume.hpp"

namespace adcad {

/// Synthetic cohort description. Defaults follow a 210 AD / 90 HC cohort of
/// 34x47x39 volumes.
struct SynthConfig {
    std::uint32_t n_ad = 210;
    std::uint32_t n_hc = 90;
    Dims dims{34, 47, 39};
    std::uint64_t seed = 42;
    double separation = 5.0;  // AD shift inside the atrophy region, in units of noise_sigma
    double noise_sigma = 0.1;

    void validate() const;
    std::uint32_t size() const { return n_ad + n_hc; }
};

/// HC voxels are base_intensity + N(0, noise_sigma^2); AD voxels inside the
/// atrophy region are additionally shifted by -separation*noise_sigma.
/// Every voxel is then clamped to [0, 1], which truncates the far Gaussian
/// tails (5 sigma above base at the default noise level).
inline constexpr double kBaseIntensity = 0.5;
inline constexpr double kAtrophyFraction = 0.10;

/// Central axis-aligned ellipsoid whose continuous volume is
/// kAtrophyFraction of the box. Semi-axes are r*n/2 per axis with
/// r = cbrt(6*fraction/pi).
std::vector<bool> atrophy_mask(const Dims& dims);

/// Subjects [0, n_ad) are AD, [n_ad, n_ad + n_hc) are HC.
Label subject_label(const SynthConfig& cfg, std::uint32_t index);
std::string subject_id(std::uint32_t index);

/// One subject, seeded by derive_seed(cfg.seed, index): the result does not
/// depend on which other subjects are generated or in what order.
Volume generate_subject(const SynthConfig& cfg, std::uint32_t index);

struct SynthCohort {
    std::vector<Volume> volumes;
    std::vector<Label> labels;
};

SynthCohort generate_cohort(const SynthConfig& cfg);

/// Writes one RVOL file per subject plus manifest.csv into out_dir and
/// returns the manifest path.
std::filesystem::path generate_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace adcad
