#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "adcad/eval.hpp"
#include "adcad/pipeline.hpp"

namespace adcad {

/// Every tunable of the pipeline in one place. Defaults: Gaussian kernel of
/// scale 2.8 with C = 1; one hidden layer of 100 units trained for at most
/// 1000 iterations with lambda 0; five folds.
struct RunConfig {
    PipelineConfig pipeline{};
    int folds = 5;
    double val_fraction = 0.10;
    std::uint64_t seed = 7;
    int threads = 0;  // 0: hardware concurrency

    void validate() const;
    CrossValidationConfig cross_validation() const;
};

nlohmann::json pipeline_config_to_json(const PipelineConfig& c);
nlohmann::json run_config_to_json(const RunConfig& c);

/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace adcad
