#include "adcad/volume.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "adcad/error.hpp"

namespace adcad {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingFile: return "missing-file";
        case ErrorKind::BadMagic: return "bad-magic";
        case ErrorKind::BadHeader: return "bad-header";
        case ErrorKind::LengthMismatch: return "length-mismatch";
        case ErrorKind::NonFinite: return "non-finite";
        case ErrorKind::Io: return "io";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::SingleClass: return "single-class";
        case ErrorKind::AllZeroSpectrum: return "all-zero-spectrum";
        case ErrorKind::NotConverged: return "not-converged";
        case ErrorKind::Diverged: return "diverged";
        case ErrorKind::UnknownLabel: return "unknown-label";
        case ErrorKind::BadFormat: return "bad-format";
    }
    return "unknown";
}

std::string to_string(Modality m) {
    switch (m) {
        case Modality::MRI: return "MRI";
        case Modality::PET: return "PET";
        case Modality::SYNTH: return "SYNTH";
    }
    return "SYNTH";
}

Modality modality_from_string(const std::string& s) {
    if (s == "MRI") return Modality::MRI;
    if (s == "PET") return Modality::PET;
    if (s == "SYNTH") return Modality::SYNTH;
    throw Error(ErrorKind::BadFormat, "unknown modality '" + s + "'");
}

Dims parse_dims(const std::string& text) {
    Dims d;
    char x1 = 0, x2 = 0;
    long long a = 0, b = 0, c = 0;
    std::istringstream in(text);
    if (!(in >> a >> x1 >> b >> x2 >> c) || x1 != 'x' || x2 != 'x' || in.peek() != EOF)
        throw Error(ErrorKind::InvalidArgument, "dims must look like NXxNYxNZ, got '" + text + "'");
    if (a < 1 || b < 1 || c < 1 || a > UINT32_MAX || b > UINT32_MAX || c > UINT32_MAX)
        throw Error(ErrorKind::InvalidArgument, "dims components must be >= 1, got '" + text + "'");
    d.nx = static_cast<std::uint32_t>(a);
    d.ny = static_cast<std::uint32_t>(b);
    d.nz = static_cast<std::uint32_t>(c);
    return d;
}

std::string to_string(const Dims& d) {
    return std::to_string(d.nx) + "x" + std::to_string(d.ny) + "x" + std::to_string(d.nz);
}

Volume::Volume(Dims dims, std::vector<float> voxels, Modality modality, std::string subject_id)
    : dims_(dims), voxels_(std::move(voxels)), modality_(modality),
      subject_id_(std::move(subject_id)) {
    require(dims_.nx >= 1 && dims_.ny >= 1 && dims_.nz >= 1, ErrorKind::InvalidArgument,
            "volume dims must be >= 1");
    require(voxels_.size() == dims_.count(), ErrorKind::LengthMismatch,
            "volume " + to_string(dims_) + " needs " + std::to_string(dims_.count()) +
                " voxels, got " + std::to_string(voxels_.size()));
    for (std::size_t i = 0; i < voxels_.size(); ++i)
        require(std::isfinite(voxels_[i]), ErrorKind::NonFinite,
                "non-finite voxel at index " + std::to_string(i));
}

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

std::uint32_t read_u32le(const unsigned char* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

void write_u32le(unsigned char* p, std::uint32_t v) {
    p[0] = static_cast<unsigned char>(v);
    p[1] = static_cast<unsigned char>(v >> 8);
    p[2] = static_cast<unsigned char>(v >> 16);
    p[3] = static_cast<unsigned char>(v >> 24);
}

}  // namespace

Volume load_volume(const std::filesystem::path& path, std::string subject_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open volume '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 4 || std::memcmp(bytes.data(), "RVOL", 4) != 0)
        throw Error(ErrorKind::BadMagic, "'" + path.string() + "' is not an RVOL file");
    if (bytes.size() < kRvolHeaderSize)
        throw Error(ErrorKind::BadHeader, "'" + path.string() + "': truncated RVOL header");
    if (bytes[4] != kRvolVersion)
        throw Error(ErrorKind::BadHeader,
                    "'" + path.string() + "': unsupported RVOL version " + std::to_string(bytes[4]));
    if (bytes[5] > 2)
        throw Error(ErrorKind::BadHeader,
                    "'" + path.string() + "': bad modality code " + std::to_string(bytes[5]));
    if (bytes[6] != 0 || bytes[7] != 0)
        throw Error(ErrorKind::BadHeader, "'" + path.string() + "': reserved bytes not zero");

    Dims d{read_u32le(&bytes[8]), read_u32le(&bytes[12]), read_u32le(&bytes[16])};
    if (d.nx == 0 || d.ny == 0 || d.nz == 0)
        throw Error(ErrorKind::BadHeader, "'" + path.string() + "': zero dimension in header");

    const std::size_t payload = bytes.size() - kRvolHeaderSize;
    if (payload % 4 != 0 || payload / 4 != d.count())
        throw Error(ErrorKind::LengthMismatch,
                    "'" + path.string() + "': header claims " + to_string(d) + " (" +
                        std::to_string(d.count()) + " voxels) but payload holds " +
                        std::to_string(payload / 4) + (payload % 4 ? "+ bytes" : ""));

    std::vector<float> voxels(d.count());
    const unsigned char* p = bytes.data() + kRvolHeaderSize;
    for (std::size_t i = 0; i < voxels.size(); ++i, p += 4) {
        voxels[i] = std::bit_cast<float>(read_u32le(p));
        if (!std::isfinite(voxels[i]))
            throw Error(ErrorKind::NonFinite,
                        "'" + path.string() + "': non-finite voxel at index " + std::to_string(i));
    }
    return Volume(d, std::move(voxels), static_cast<Modality>(bytes[5]), std::move(subject_id));
}

void save_volume(const Volume& v, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes(kRvolHeaderSize + 4 * v.voxels().size());
    std::memcpy(bytes.data(), "RVOL", 4);
    bytes[4] = kRvolVersion;
    bytes[5] = static_cast<unsigned char>(v.modality());
    bytes[6] = bytes[7] = 0;
    write_u32le(&bytes[8], v.dims().nx);
    write_u32le(&bytes[12], v.dims().ny);
    write_u32le(&bytes[16], v.dims().nz);
    unsigned char* p = bytes.data() + kRvolHeaderSize;
    for (float f : v.voxels()) {
        write_u32le(p, std::bit_cast<std::uint32_t>(f));
        p += 4;
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write volume '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

Eigen::VectorXd flatten(const Volume& v) {
    return Eigen::Map<const Eigen::VectorXf>(v.voxels().data(),
                                             static_cast<Eigen::Index>(v.voxels().size()))
        .cast<double>();
}

}  // namespace adcad
