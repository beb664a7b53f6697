#include "adcad/features.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace adcad {

std::string to_string(FeatureKind k) { return k == FeatureKind::VAF ? "VAF" : "GRAYSCALE"; }

FeatureKind feature_kind_from_string(const std::string& s) {
    if (s == "GRAYSCALE" || s == "grayscale") return FeatureKind::GRAYSCALE;
    if (s == "VAF" || s == "vaf") return FeatureKind::VAF;
    throw Error(ErrorKind::InvalidArgument, "unknown feature kind '" + s + "'");
}

void FeatureConfig::validate() const {
    require(bins >= 1, ErrorKind::InvalidArgument, "bins must be >= 1");
    require(block_grid.bx >= 1 && block_grid.by >= 1 && block_grid.bz >= 1,
            ErrorKind::InvalidArgument, "block grid components must be >= 1");
}

namespace {

struct Slab {
    std::uint32_t begin, end;
};

Slab slab(std::uint32_t n, std::uint32_t b, std::uint32_t i) {
    const std::uint32_t size = n / b;
    return {i * size, i + 1 == b ? n : (i + 1) * size};
}

}  // namespace

Eigen::VectorXd block_features(const Volume& v, const BlockGrid& g, int bins) {
    const Dims& d = v.dims();
    require(g.bx >= 1 && g.by >= 1 && g.bz >= 1, ErrorKind::InvalidArgument,
            "block grid components must be >= 1");
    require(g.bx <= d.nx && g.by <= d.ny && g.bz <= d.nz, ErrorKind::InvalidArgument,
            "block grid " + std::to_string(g.bx) + "x" + std::to_string(g.by) + "x" +
                std::to_string(g.bz) + " exceeds volume dims " + to_string(d));

    Eigen::VectorXd out(kGrayscaleStats * static_cast<Eigen::Index>(g.count()));
    std::vector<double> buf;
    Eigen::Index block = 0;
    for (std::uint32_t kz = 0; kz < g.bz; ++kz)
        for (std::uint32_t ky = 0; ky < g.by; ++ky)
            for (std::uint32_t kx = 0; kx < g.bx; ++kx, ++block) {
                const Slab sx = slab(d.nx, g.bx, kx), sy = slab(d.ny, g.by, ky),
                           sz = slab(d.nz, g.bz, kz);
                buf.clear();
                for (std::uint32_t z = sz.begin; z < sz.end; ++z)
                    for (std::uint32_t y = sy.begin; y < sy.end; ++y)
                        for (std::uint32_t x = sx.begin; x < sx.end; ++x) buf.push_back(v.at(x, y, z));
                Eigen::Map<const Eigen::VectorXd> values(buf.data(), static_cast<Eigen::Index>(buf.size()));
                out.segment<kGrayscaleStats>(kGrayscaleStats * block) = grayscale_features(values, bins);
            }
    return out;
}

Eigen::VectorXd vaf_features(const Volume& v) { return flatten(v); }

Eigen::VectorXd extract_features(const Volume& v, const FeatureConfig& cfg) {
    return cfg.kind == FeatureKind::VAF ? vaf_features(v) : block_features(v, cfg.block_grid, cfg.bins);
}

FeatureMatrix build_feature_matrix(std::span<const Volume> volumes, std::span<const Label> labels,
                                   const FeatureConfig& cfg) {
    cfg.validate();
    require(!volumes.empty(), ErrorKind::InvalidArgument, "no volumes to extract features from");
    require(volumes.size() == labels.size(), ErrorKind::DimensionMismatch,
            "volume and label counts differ");

    const Dims dims = volumes.front().dims();
    FeatureMatrix fm;
    fm.kind = cfg.kind;
    fm.block_grid = cfg.block_grid;
    fm.labels.assign(labels.begin(), labels.end());
    for (std::size_t i = 0; i < volumes.size(); ++i) {
        const Volume& v = volumes[i];
        require(v.dims() == dims, ErrorKind::DimensionMismatch,
                "subject '" + v.subject_id() + "' has dims " + to_string(v.dims()) +
                    ", expected " + to_string(dims));
        Eigen::VectorXd row = extract_features(v, cfg);
        if (i == 0) fm.values.resize(static_cast<Eigen::Index>(volumes.size()), row.size());
        fm.values.row(static_cast<Eigen::Index>(i)) = row.transpose();
        fm.subject_ids.push_back(v.subject_id());
    }
    return fm;
}

FeatureMatrix build_feature_matrix(const std::filesystem::path& manifest_path, const FeatureConfig& cfg) {
    const Manifest m = read_manifest(manifest_path);
    require(!m.rows.empty(), ErrorKind::InvalidArgument, "manifest '" + manifest_path.string() + "' has no rows");
    std::vector<Volume> volumes;
    volumes.reserve(m.rows.size());
    for (const auto& row : m.rows) volumes.push_back(load_volume(m.resolve(row), row.subject_id));
    const auto labels = m.labels();
    return build_feature_matrix(volumes, labels, cfg);
}

void write_feature_csv(const FeatureMatrix& fm, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << "subject_id,label";
    for (Eigen::Index j = 0; j < fm.cols(); ++j) out << ",f" << j;
    out << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < fm.rows(); ++i) {
        out << fm.subject_ids[static_cast<std::size_t>(i)] << ',' << to_string(fm.labels[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < fm.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", fm.values(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open '" + path.string() + "'");
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::BadFormat, "empty feature CSV");
    const auto m = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',')) - 1;
    require(line.rfind("subject_id,label", 0) == 0 && m >= 0, ErrorKind::BadFormat,
            "feature CSV has bad header");

    FeatureMatrix fm;
    std::vector<double> flat;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        fm.subject_ids.push_back(cell);
        std::getline(row, cell, ',');
        fm.labels.push_back(parse_label(cell));
        Eigen::Index count = 0;
        while (std::getline(row, cell, ',')) {
            flat.push_back(std::stod(cell));
            ++count;
        }
        require(count == m, ErrorKind::BadFormat, "feature CSV row has wrong column count");
    }
    fm.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), static_cast<Eigen::Index>(fm.labels.size()), m);
    fm.kind = FeatureKind::GRAYSCALE;
    return fm;
}

}  // namespace adcad
