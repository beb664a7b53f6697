#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "adcad/ann.hpp"
#include "adcad/pca.hpp"
#include "adcad/pipeline.hpp"
#include "adcad/standardize.hpp"
#include "adcad/svm.hpp"

namespace adcad {

inline constexpr int kModelFormatVersion = 1;

// Matrices are stored row-major as flat arrays next to their shape.
nlohmann::json pca_to_json(const PcaModel<double>& m);
PcaModel<double> pca_from_json(const nlohmann::json& j);

nlohmann::json standardizer_to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& j);

nlohmann::json svm_to_json(const SvmModel<double>& m, const Standardizer& s);
SvmModel<double> svm_from_json(const nlohmann::json& j);

nlohmann::json ann_to_json(const AnnModel<double>& m, const Standardizer& s);
AnnModel<double> ann_from_json(const nlohmann::json& j);

nlohmann::json feature_config_to_json(const FeatureConfig& f);
FeatureConfig feature_config_from_json(const nlohmann::json& j);

/// Whole trained pipeline: {version, pipeline, features, pca|null, classifier}.
nlohmann::json pipeline_to_json(const FittedPipeline& p);
FittedPipeline pipeline_from_json(const nlohmann::json& j);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace adcad
