#include "adcad/serialize.hpp"

#include <fstream>

namespace adcad {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd mat_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
    const auto flat = j.at("data").get<std::vector<double>>();
    require(static_cast<Eigen::Index>(flat.size()) == rows * cols, ErrorKind::BadFormat, "matrix shape/data mismatch");
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), rows,
                                                                                                   cols);
}

void check_version(const json& j, const char* what) {
    require(j.contains("version") && j.at("version").get<int>() == kModelFormatVersion, ErrorKind::BadFormat,
            std::string(what) + ": unsupported or missing version");
}

}  // namespace

json pca_to_json(const PcaModel<double>& m) {
    json j = {{"version", kModelFormatVersion},
              {"means", vec_to_json(m.means)},
              {"eigenvalues", vec_to_json(m.eigenvalues)},
              {"components", mat_to_json(m.components)},
              {"retained", m.retained},
              {"contribution", vec_to_json(m.contribution)}};
    if (m.scales.size() > 0) j["scales"] = vec_to_json(m.scales);
    return j;
}

PcaModel<double> pca_from_json(const json& j) {
    check_version(j, "pca model");
    PcaModel<double> m;
    m.means = vec_from_json(j.at("means"));
    if (j.contains("scales")) m.scales = vec_from_json(j.at("scales"));
    m.eigenvalues = vec_from_json(j.at("eigenvalues"));
    m.components = mat_from_json(j.at("components"));
    m.retained = j.at("retained").get<Eigen::Index>();
    m.contribution = vec_from_json(j.at("contribution"));
    require(m.components.rows() == m.means.size() && m.retained >= 1 && m.retained <= m.components.cols(),
            ErrorKind::BadFormat, "pca model: inconsistent shapes");
    return m;
}

json standardizer_to_json(const Standardizer& s) {
    return {{"means", vec_to_json(s.means)}, {"sigmas", vec_to_json(s.sigmas)}};
}

Standardizer standardizer_from_json(const json& j) {
    Standardizer s{vec_from_json(j.at("means")), vec_from_json(j.at("sigmas"))};
    require(s.means.size() == s.sigmas.size(), ErrorKind::BadFormat, "standardization: length mismatch");
    return s;
}

json svm_to_json(const SvmModel<double>& m, const Standardizer& s) {
    return {{"version", kModelFormatVersion},
            {"kernel", to_string(m.kernel.kind)},
            {"scale", m.kernel.scale},
            {"C", m.C},
            {"bias", m.bias},
            {"support_vectors", mat_to_json(m.support_vectors)},
            {"alphas", vec_to_json(m.alphas)},
            {"labels", vec_to_json(m.labels)},
            {"standardization", standardizer_to_json(s)}};
}

SvmModel<double> svm_from_json(const json& j) {
    check_version(j, "svm model");
    SvmModel<double> m;
    m.kernel.kind = kernel_kind_from_string(j.at("kernel").get<std::string>());
    m.kernel.scale = j.at("scale").get<double>();
    m.C = j.at("C").get<double>();
    m.bias = j.at("bias").get<double>();
    m.support_vectors = mat_from_json(j.at("support_vectors"));
    m.alphas = vec_from_json(j.at("alphas"));
    m.labels = vec_from_json(j.at("labels"));
    require(m.alphas.size() == m.labels.size() && m.alphas.size() == m.support_vectors.rows(), ErrorKind::BadFormat,
            "svm model: inconsistent support set");
    return m;
}

json ann_to_json(const AnnModel<double>& m, const Standardizer& s) {
    return {{"version", kModelFormatVersion},
            {"activation", to_string(m.activation)},
            {"w1", mat_to_json(m.w1)},
            {"b1", vec_to_json(m.b1)},
            {"w2", vec_to_json(m.w2)},
            {"b2", m.b2},
            {"standardization", standardizer_to_json(s)}};
}

AnnModel<double> ann_from_json(const json& j) {
    check_version(j, "ann model");
    AnnModel<double> m;
    m.activation = activation_from_string(j.at("activation").get<std::string>());
    m.w1 = mat_from_json(j.at("w1"));
    m.b1 = vec_from_json(j.at("b1"));
    m.w2 = vec_from_json(j.at("w2"));
    m.b2 = j.at("b2").get<double>();
    require(m.b1.size() == m.w1.rows() && m.w2.size() == m.w1.rows(), ErrorKind::BadFormat,
            "ann model: inconsistent layer shapes");
    return m;
}

json feature_config_to_json(const FeatureConfig& f) {
    return {{"kind", to_string(f.kind)},
            {"block_grid", {f.block_grid.bx, f.block_grid.by, f.block_grid.bz}},
            {"bins", f.bins}};
}

FeatureConfig feature_config_from_json(const json& j) {
    FeatureConfig f;
    f.kind = feature_kind_from_string(j.at("kind").get<std::string>());
    const auto g = j.at("block_grid").get<std::vector<std::uint32_t>>();
    require(g.size() == 3, ErrorKind::BadFormat, "block_grid needs 3 entries");
    f.block_grid = {g[0], g[1], g[2]};
    f.bins = j.at("bins").get<int>();
    return f;
}

json pipeline_to_json(const FittedPipeline& p) {
    json j = {{"version", kModelFormatVersion},
              {"pipeline", to_string(p.id)},
              {"features", feature_config_to_json(p.features)},
              {"pca", p.pca ? pca_to_json(*p.pca) : json(nullptr)}};
    if (const auto* svm = std::get_if<SvmModel<double>>(&p.classifier)) {
        j["classifier"] = svm_to_json(*svm, p.standardizer);
        j["classifier"]["type"] = "svm";
    } else {
        j["classifier"] = ann_to_json(std::get<AnnModel<double>>(p.classifier), p.standardizer);
        j["classifier"]["type"] = "ann";
    }
    return j;
}

FittedPipeline pipeline_from_json(const json& j) {
    check_version(j, "pipeline model");
    FittedPipeline p;
    p.id = pipeline_from_string(j.at("pipeline").get<std::string>());
    p.features = feature_config_from_json(j.at("features"));
    if (!j.at("pca").is_null()) p.pca = pca_from_json(j.at("pca"));
    const json& c = j.at("classifier");
    p.standardizer = standardizer_from_json(c.at("standardization"));
    if (c.at("type").get<std::string>() == "svm")
        p.classifier = svm_from_json(c);
    else
        p.classifier = ann_from_json(c);
    return p;
}

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadFormat, "'" + path.string() + "': " + e.what());
    }
}

}  // namespace adcad
