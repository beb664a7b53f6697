#include "adcad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "adcad/error.hpp"
#include "adcad/rng.hpp"

namespace adcad {

void SynthConfig::validate() const {
    require(n_ad >= 1 && n_hc >= 1, ErrorKind::InvalidArgument,
            "synthetic cohort needs at least one AD and one HC subject");
    require(dims.nx >= 1 && dims.ny >= 1 && dims.nz >= 1, ErrorKind::InvalidArgument,
            "synthetic dims must be >= 1");
    require(std::isfinite(separation) && separation >= 0.0, ErrorKind::InvalidArgument,
            "separation must be >= 0");
    require(std::isfinite(noise_sigma) && noise_sigma > 0.0, ErrorKind::InvalidArgument,
            "noise_sigma must be > 0");
}

std::vector<bool> atrophy_mask(const Dims& d) {
    const double r = std::cbrt(6.0 * kAtrophyFraction / std::numbers::pi);
    const double cx = (d.nx - 1) / 2.0, cy = (d.ny - 1) / 2.0, cz = (d.nz - 1) / 2.0;
    const double ax = r * d.nx / 2.0, ay = r * d.ny / 2.0, az = r * d.nz / 2.0;

    std::vector<bool> mask(d.count());
    std::size_t i = 0;
    for (std::uint32_t z = 0; z < d.nz; ++z)
        for (std::uint32_t y = 0; y < d.ny; ++y)
            for (std::uint32_t x = 0; x < d.nx; ++x, ++i) {
                const double u = (x - cx) / ax, v = (y - cy) / ay, w = (z - cz) / az;
                mask[i] = u * u + v * v + w * w <= 1.0;
            }
    return mask;
}

Label subject_label(const SynthConfig& cfg, std::uint32_t index) {
    return index < cfg.n_ad ? Label::AD : Label::HC;
}

std::string subject_id(std::uint32_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "sub-%04u", index);
    return buf;
}

namespace {

Volume generate_subject_masked(const SynthConfig& cfg, std::uint32_t index,
                               const std::vector<bool>& mask) {
    Rng rng(derive_seed(cfg.seed, index));
    const bool ad = subject_label(cfg, index) == Label::AD;
    const double shift = ad ? -cfg.separation * cfg.noise_sigma : 0.0;

    std::vector<float> voxels(cfg.dims.count());
    for (std::size_t i = 0; i < voxels.size(); ++i) {
        double v = kBaseIntensity + cfg.noise_sigma * rng.normal();
        if (mask[i]) v += shift;
        voxels[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return Volume(cfg.dims, std::move(voxels), Modality::SYNTH, subject_id(index));
}

}  // namespace

Volume generate_subject(const SynthConfig& cfg, std::uint32_t index) {
    cfg.validate();
    require(index < cfg.size(), ErrorKind::InvalidArgument, "subject index out of range");
    return generate_subject_masked(cfg, index, atrophy_mask(cfg.dims));
}

SynthCohort generate_cohort(const SynthConfig& cfg) {
    cfg.validate();
    const auto mask = atrophy_mask(cfg.dims);
    SynthCohort cohort;
    cohort.volumes.reserve(cfg.size());
    for (std::uint32_t i = 0; i < cfg.size(); ++i) {
        cohort.volumes.push_back(generate_subject_masked(cfg, i, mask));
        cohort.labels.push_back(subject_label(cfg, i));
    }
    return cohort;
}

std::filesystem::path generate_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create '" + out_dir.string() + "': " + ec.message());

    const auto mask = atrophy_mask(cfg.dims);
    Manifest m;
    m.location = out_dir / "manifest.csv";
    for (std::uint32_t i = 0; i < cfg.size(); ++i) {
        Volume v = generate_subject_masked(cfg, i, mask);
        std::filesystem::path rel = v.subject_id() + ".rvol";
        save_volume(v, out_dir / rel);
        m.rows.push_back({v.subject_id(), subject_label(cfg, i), rel, Modality::SYNTH});
    }
    write_manifest(m, m.location);
    return m.location;
}

}  // namespace adcad
