#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace adcad {

enum class Modality : std::uint8_t { MRI = 0, PET = 1, SYNTH = 2 };

std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

struct Dims {
    std::uint32_t nx = 1;
    std::uint32_t ny = 1;
    std::uint32_t nz = 1;

    std::size_t count() const { return std::size_t{nx} * ny * nz; }
    bool operator==(const Dims&) const = default;
};

/// Parses "34x47x39".
Dims parse_dims(const std::string& text);
std::string to_string(const Dims& d);

/// 3-D voxel grid, row-major with x fastest: index = x + nx*(y + ny*z).
/// Voxels are stored as 32-bit floats, the precision of the RVOL payload.
class Volume {
public:
    Volume(Dims dims, std::vector<float> voxels, Modality modality = Modality::SYNTH,
           std::string subject_id = {});

    const Dims& dims() const { return dims_; }
    const std::vector<float>& voxels() const { return voxels_; }
    Modality modality() const { return modality_; }
    const std::string& subject_id() const { return subject_id_; }

    float at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return voxels_[x + std::size_t{dims_.nx} * (y + std::size_t{dims_.ny} * z)];
    }

private:
    Dims dims_;
    std::vector<float> voxels_;
    Modality modality_;
    std::string subject_id_;
};

// RVOL layout: "RVOL", u8 version (=1), u8 modality, u16 reserved (0),
// u32 nx, u32 ny, u32 nz (little endian), then nx*ny*nz little-endian
// float32 voxels in x-fastest order.
inline constexpr std::size_t kRvolHeaderSize = 20;
inline constexpr std::uint8_t kRvolVersion = 1;

Volume load_volume(const std::filesystem::path& path, std::string subject_id = {});
void save_volume(const Volume& v, const std::filesystem::path& path);

Eigen::VectorXd flatten(const Volume& v);

}  // namespace adcad
