#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "adcad/features.hpp"
#include "adcad/manifest.hpp"
#include "adcad/pipeline.hpp"

namespace adcad {

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Stratified k-fold split. Each class is shuffled with Rng(seed) and dealt
/// round-robin into k test folds. Of the remaining members of each class,
/// round(val_fraction * class_size) go to validation and the rest to
/// training, so 5 folds with val_fraction 0.1 give a 70/10/20 split.
/// Index lists are sorted ascending.
std::vector<Fold> stratified_split(std::span<const Label> labels, int k, double val_fraction, std::uint64_t seed);

/// Positive class is AD.
struct ConfusionMatrix {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;

    std::size_t total() const { return tp + fn + fp + tn; }
    std::size_t errors() const { return fn + fp; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp, fn += o.fn, fp += o.fp, tn += o.tn;
        return *this;
    }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred);

/// Ratios with a zero denominator are absent rather than 0 or NaN.
struct Metrics {
    double accuracy = 0.0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
};

Metrics metrics(const ConfusionMatrix& cm);

struct FoldResult {
    ConfusionMatrix cm;
    Metrics metrics;
    Eigen::Index pca_retained = 0;  // 0 when the pipeline has no PCA stage
    std::optional<AnnSummary> ann;
    std::size_t support_vectors = 0;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
};

struct EvalReport {
    PipelineId pipeline = PipelineId::PCA_SVM;
    std::vector<FoldResult> folds;
    ConfusionMatrix aggregate;  // summed over folds
    Metrics overall;            // metrics(aggregate)
    std::uint64_t seed = 0;
    nlohmann::json config;      // effective configuration echo
    std::vector<std::string> notes;

    double train_seconds() const;
    double predict_throughput() const;  // test observations per second
};

/// Seed for fold `fold` of pipeline `id` under the master seed.
std::uint64_t fold_seed(std::uint64_t seed, PipelineId id, std::size_t fold);

/// Fits pipeline `id` on the fold's train (and validation) rows of X. Test
/// rows are never read.
FittedPipeline fit_fold(const FeatureMatrix& X, const Fold& fold, PipelineId id, const PipelineConfig& cfg,
                        std::uint64_t seed);

/// Runs every fold (concurrently up to `threads`) and assembles the report
/// in fold order; results do not depend on the thread count.
EvalReport evaluate_pipeline(const FeatureMatrix& X, std::span<const Fold> folds, PipelineId id,
                             const PipelineConfig& cfg, std::uint64_t seed, int threads = 1);

struct CrossValidationConfig {
    PipelineConfig pipeline{};
    int folds = 5;
    double val_fraction = 0.10;
    int threads = 1;

    void validate() const;
};

std::vector<EvalReport> cross_validate(std::span<const Volume> volumes, std::span<const Label> labels,
                                       std::span<const PipelineId> pipelines, const CrossValidationConfig& cfg,
                                       std::uint64_t seed);
std::vector<EvalReport> cross_validate(const std::filesystem::path& manifest, std::span<const PipelineId> pipelines,
                                       const CrossValidationConfig& cfg, std::uint64_t seed);

nlohmann::json report_to_json(const EvalReport& r, bool include_timing = true);
nlohmann::json reports_to_json(std::span<const EvalReport> reports, bool include_timing = true);
/// pipeline,fold,tp,fn,fp,tn,accuracy,sensitivity,specificity; fold "all"
/// holds the aggregate. Absent ratios are empty cells.
void write_report_csv(std::span<const EvalReport> reports, const std::filesystem::path& path);

}  // namespace adcad
