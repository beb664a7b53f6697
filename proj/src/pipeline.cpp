#include "adcad/pipeline.hpp"

#include <algorithm>
#include <sstream>

namespace adcad {

std::string to_string(PipelineId id) {
    switch (id) {
        case PipelineId::PCA_SVM: return "PCA-SVM";
        case PipelineId::PCA_ANN: return "PCA-ANN";
        case PipelineId::VAF_SVM: return "VAF-SVM";
    }
    return "PCA-SVM";
}

PipelineId pipeline_from_string(const std::string& s) {
    std::string u = s;
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (u == "PCA-SVM") return PipelineId::PCA_SVM;
    if (u == "PCA-ANN") return PipelineId::PCA_ANN;
    if (u == "VAF-SVM") return PipelineId::VAF_SVM;
    throw Error(ErrorKind::InvalidArgument, "unknown pipeline '" + s + "' (expected pca-svm, pca-ann or vaf-svm)");
}

std::vector<PipelineId> parse_pipeline_list(const std::string& csv) {
    std::vector<PipelineId> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        const PipelineId id = pipeline_from_string(item);
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    require(!out.empty(), ErrorKind::InvalidArgument, "no pipelines given");
    return out;
}

bool uses_pca(PipelineId id) { return id != PipelineId::VAF_SVM; }
bool uses_svm(PipelineId id) { return id != PipelineId::PCA_ANN; }
FeatureKind feature_kind(PipelineId id) { return uses_pca(id) ? FeatureKind::GRAYSCALE : FeatureKind::VAF; }

void PipelineConfig::validate() const {
    features.validate();
    pca.validate();
    svm.validate();
    ann.validate();
}

Eigen::MatrixXd FittedPipeline::transform(const Eigen::MatrixXd& X) const {
    if (pca) return standardizer.apply(project(*pca, X));
    return standardizer.apply(X);
}

Eigen::VectorXd FittedPipeline::decision(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd Z = transform(X);
    return std::visit([&](const auto& model) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, SvmModel<double>>)
            return adcad::decision(model, Z);
        else
            return forward(model, Z);
    }, classifier);
}

std::vector<Label> FittedPipeline::classify(const Eigen::MatrixXd& X) const {
    const Eigen::VectorXd f = decision(X);
    std::vector<Label> out(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = label_from_score(f(i));
    return out;
}

Eigen::VectorXd targets_from_labels(const std::vector<Label>& labels) {
    Eigen::VectorXd t(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) t(static_cast<Eigen::Index>(i)) = to_target(labels[i]);
    return t;
}

FittedPipeline fit_pipeline(PipelineId id, const Eigen::MatrixXd& X_train, const std::vector<Label>& y_train,
                            const Eigen::MatrixXd& X_val, const std::vector<Label>& y_val,
                            const PipelineConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    require(X_train.rows() == static_cast<Eigen::Index>(y_train.size()), ErrorKind::DimensionMismatch,
            "fit_pipeline: training rows/labels mismatch");
    require(X_val.rows() == static_cast<Eigen::Index>(y_val.size()), ErrorKind::DimensionMismatch,
            "fit_pipeline: validation rows/labels mismatch");

    FittedPipeline fp;
    fp.id = id;
    fp.features = cfg.features;
    fp.features.kind = feature_kind(id);

    Eigen::MatrixXd Z = X_train;
    if (uses_pca(id)) {
        fp.pca = fit_pca(X_train, cfg.pca);
        Z = project(*fp.pca, X_train);
    }
    fp.standardizer = Standardizer::fit(Z);
    Z = fp.standardizer.apply(Z);
    const Eigen::VectorXd t = targets_from_labels(y_train);

    if (uses_svm(id)) {
        fp.classifier = train_svm(Z, t, cfg.svm);
    } else {
        TrainConfig tc = cfg.ann;
        tc.seed = seed;
        std::optional<ValidationSet<double>> val;
        if (X_val.rows() > 0) val = ValidationSet<double>{fp.transform(X_val), targets_from_labels(y_val)};
        auto res = train_ann(Z, t, tc, val ? &*val : nullptr);
        fp.ann_summary = AnnSummary{res.iterations, res.best_iteration, res.stop,
                                    static_cast<double>(sse(res.model, Z, t, tc.lambda))};
        fp.classifier = std::move(res.model);
    }
    return fp;
}

}  // namespace adcad
