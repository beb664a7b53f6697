#include "adcad/config.hpp"

#include <thread>

#include "adcad/serialize.hpp"

namespace adcad {

using nlohmann::json;

namespace {

std::string solver_name(PcaSolver s) {
    switch (s) {
        case PcaSolver::Auto: return "auto";
        case PcaSolver::Direct: return "direct";
        case PcaSolver::Gram: return "gram";
    }
    return "auto";
}

PcaSolver solver_from_name(const std::string& s) {
    if (s == "auto") return PcaSolver::Auto;
    if (s == "direct") return PcaSolver::Direct;
    if (s == "gram") return PcaSolver::Gram;
    throw Error(ErrorKind::InvalidArgument, "unknown PCA solver '" + s + "'");
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    require(j.is_object(), ErrorKind::BadFormat, "config: '" + where + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        require(ok, ErrorKind::BadFormat, "config: unknown key '" + where + "." + key + "'");
    }
}

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
    pipeline.validate();
    require(folds >= 2, ErrorKind::InvalidArgument, "folds must be >= 2");
    require(val_fraction >= 0.0 && val_fraction < 1.0, ErrorKind::InvalidArgument, "val_fraction must lie in [0, 1)");
    require(threads >= 0, ErrorKind::InvalidArgument, "threads must be >= 0");
}

CrossValidationConfig RunConfig::cross_validation() const {
    CrossValidationConfig cv;
    cv.pipeline = pipeline;
    cv.folds = folds;
    cv.val_fraction = val_fraction;
    cv.threads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return cv;
}

json pipeline_config_to_json(const PipelineConfig& c) {
    return {{"features", feature_config_to_json(c.features)},
            {"pca",
             {{"cum_threshold", c.pca.cum_threshold},
              {"scale_features", c.pca.scale_features},
              {"solver", solver_name(c.pca.solver)}}},
            {"svm",
             {{"kernel", to_string(c.svm.kernel.kind)},
              {"scale", c.svm.kernel.scale},
              {"C", c.svm.C},
              {"tol", c.svm.tol}}},
            {"ann",
             {{"hidden", c.ann.hidden},
              {"max_iters", c.ann.max_iters},
              {"trainer", to_string(c.ann.trainer)},
              {"activation", to_string(c.ann.activation)},
              {"mu0", c.ann.mu0},
              {"mu_inc", c.ann.mu_inc},
              {"mu_dec", c.ann.mu_dec},
              {"mu_max", c.ann.mu_max},
              {"lr", c.ann.lr},
              {"momentum", c.ann.momentum},
              {"goal_sse", c.ann.goal_sse},
              {"lambda", c.ann.lambda},
              {"patience", c.ann.patience}}}};
}

json run_config_to_json(const RunConfig& c) {
    json j = pipeline_config_to_json(c.pipeline);
    j["folds"] = c.folds;
    j["val_fraction"] = c.val_fraction;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j;
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
    try {
        reject_unknown(j, {"features", "pca", "svm", "ann", "folds", "val_fraction", "seed", "threads"}, "root");
        if (j.contains("features")) {
            const json& f = j.at("features");
            reject_unknown(f, {"kind", "block_grid", "bins"}, "features");
            if (f.contains("kind")) c.pipeline.features.kind = feature_kind_from_string(f.at("kind").get<std::string>());
            if (f.contains("block_grid")) {
                const auto g = f.at("block_grid").get<std::vector<std::uint32_t>>();
                require(g.size() == 3, ErrorKind::BadFormat, "config: block_grid needs 3 entries");
                c.pipeline.features.block_grid = {g[0], g[1], g[2]};
            }
            take(f, "bins", c.pipeline.features.bins);
        }
        if (j.contains("pca")) {
            const json& p = j.at("pca");
            reject_unknown(p, {"cum_threshold", "scale_features", "solver"}, "pca");
            take(p, "cum_threshold", c.pipeline.pca.cum_threshold);
            take(p, "scale_features", c.pipeline.pca.scale_features);
            if (p.contains("solver")) c.pipeline.pca.solver = solver_from_name(p.at("solver").get<std::string>());
        }
        if (j.contains("svm")) {
            const json& s = j.at("svm");
            reject_unknown(s, {"kernel", "scale", "C", "tol"}, "svm");
            if (s.contains("kernel")) c.pipeline.svm.kernel.kind = kernel_kind_from_string(s.at("kernel").get<std::string>());
            take(s, "scale", c.pipeline.svm.kernel.scale);
            take(s, "C", c.pipeline.svm.C);
            take(s, "tol", c.pipeline.svm.tol);
        }
        if (j.contains("ann")) {
            const json& a = j.at("ann");
            reject_unknown(a, {"hidden", "max_iters", "trainer", "activation", "mu0", "mu_inc", "mu_dec", "mu_max", "lr",
                               "momentum", "goal_sse", "lambda", "patience"},
                           "ann");
            auto& t = c.pipeline.ann;
            take(a, "hidden", t.hidden);
            take(a, "max_iters", t.max_iters);
            if (a.contains("trainer")) t.trainer = trainer_from_string(a.at("trainer").get<std::string>());
            if (a.contains("activation")) t.activation = activation_from_string(a.at("activation").get<std::string>());
            take(a, "mu0", t.mu0);
            take(a, "mu_inc", t.mu_inc);
            take(a, "mu_dec", t.mu_dec);
            take(a, "mu_max", t.mu_max);
            take(a, "lr", t.lr);
            take(a, "momentum", t.momentum);
            take(a, "goal_sse", t.goal_sse);
            take(a, "lambda", t.lambda);
            take(a, "patience", t.patience);
        }
        take(j, "folds", c.folds);
        take(j, "val_fraction", c.val_fraction);
        take(j, "seed", c.seed);
        take(j, "threads", c.threads);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::BadFormat, std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
    return run_config_from_json(read_json(path), base);
}

}  // namespace adcad
