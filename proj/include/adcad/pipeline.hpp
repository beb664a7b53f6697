#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "adcad/ann.hpp"
#include "adcad/features.hpp"
#include "adcad/pca.hpp"
#include "adcad/standardize.hpp"
#include "adcad/svm.hpp"

namespace adcad {

enum class PipelineId { PCA_SVM, PCA_ANN, VAF_SVM };

std::string to_string(PipelineId id);
PipelineId pipeline_from_string(const std::string& s);  // "pca-svm", "PCA-SVM", ...
std::vector<PipelineId> parse_pipeline_list(const std::string& csv);

bool uses_pca(PipelineId id);
bool uses_svm(PipelineId id);
FeatureKind feature_kind(PipelineId id);

/// Everything a pipeline fit needs besides data.
struct PipelineConfig {
    FeatureConfig features{};  // feature extraction for the PCA pipelines
    PcaConfig pca{};
    SvmConfig svm{};
    TrainConfig ann{};

    void validate() const;
};

struct AnnSummary {
    int iterations = 0;
    int best_iteration = 0;
    StopReason stop = StopReason::MaxIters;
    double final_train_sse = 0.0;
};

/// A trained pipeline: optional PCA, classifier-input z-scoring, classifier.
/// The stages apply in that order to a raw feature row.
struct FittedPipeline {
    PipelineId id = PipelineId::PCA_SVM;
    FeatureConfig features{};
    std::optional<PcaModel<double>> pca;
    Standardizer standardizer;
    std::variant<SvmModel<double>, AnnModel<double>> classifier;
    std::optional<AnnSummary> ann_summary;

    /// Classifier inputs for raw feature rows.
    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
    Eigen::VectorXd decision(const Eigen::MatrixXd& X) const;
    std::vector<Label> classify(const Eigen::MatrixXd& X) const;
};

Eigen::VectorXd targets_from_labels(const std::vector<Label>& labels);

/// Fits every stage on (X_train, y_train) only. The validation rows are
/// consulted solely for ANN early stopping; SVM pipelines ignore them.
FittedPipeline fit_pipeline(PipelineId id, const Eigen::MatrixXd& X_train, const std::vector<Label>& y_train,
                            const Eigen::MatrixXd& X_val, const std::vector<Label>& y_val,
                            const PipelineConfig& cfg, std::uint64_t seed);

}  // namespace adcad
