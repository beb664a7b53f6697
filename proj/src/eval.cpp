#include "adcad/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <fstream>
#include <mutex>
#include <thread>

#include "adcad/config.hpp"
#include "adcad/rng.hpp"

namespace adcad {

using nlohmann::json;

std::vector<Fold> stratified_split(std::span<const Label> labels, int k, double val_fraction, std::uint64_t seed) {
    require(k >= 2, ErrorKind::InvalidArgument, "stratified_split: need k >= 2");
    require(val_fraction >= 0.0 && val_fraction < 1.0, ErrorKind::InvalidArgument,
            "stratified_split: val_fraction must lie in [0, 1)");

    Rng rng(seed);
    std::vector<Fold> folds(static_cast<std::size_t>(k));
    for (Label cls : {Label::AD, Label::HC}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) members.push_back(i);
        require(members.size() >= static_cast<std::size_t>(k), ErrorKind::InvalidArgument,
                "stratified_split: class " + to_string(cls) + " has " + std::to_string(members.size()) +
                    " members, fewer than " + std::to_string(k) + " folds");
        rng.shuffle(members.begin(), members.end());

        const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(members.size())));
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<std::size_t> rest;
            for (std::size_t pos = 0; pos < members.size(); ++pos)
                (pos % folds.size() == f ? folds[f].test : rest).push_back(members[pos]);
            const std::size_t take = std::min(n_val, rest.empty() ? 0 : rest.size() - 1);
            folds[f].val.insert(folds[f].val.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(take));
            folds[f].train.insert(folds[f].train.end(), rest.begin() + static_cast<std::ptrdiff_t>(take), rest.end());
        }
    }
    for (auto& f : folds) {
        std::sort(f.train.begin(), f.train.end());
        std::sort(f.val.begin(), f.val.end());
        std::sort(f.test.begin(), f.test.end());
    }
    return folds;
}

ConfusionMatrix confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
    require(y_true.size() == y_pred.size(), ErrorKind::DimensionMismatch, "confusion: length mismatch");
    require(!y_true.empty(), ErrorKind::InvalidArgument, "confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool truth = y_true[i] == Label::AD, pred = y_pred[i] == Label::AD;
        if (truth && pred) ++cm.tp;
        else if (truth) ++cm.fn;
        else if (pred) ++cm.fp;
        else ++cm.tn;
    }
    return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
    require(cm.total() > 0, ErrorKind::InvalidArgument, "metrics: empty confusion matrix");
    Metrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fn > 0) m.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    if (cm.tn + cm.fp > 0) m.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    return m;
}

double EvalReport::train_seconds() const {
    double s = 0.0;
    for (const auto& f : folds) s += f.train_seconds;
    return folds.empty() ? 0.0 : s / static_cast<double>(folds.size());
}

double EvalReport::predict_throughput() const {
    double s = 0.0;
    for (const auto& f : folds) s += f.predict_seconds;
    return s > 0.0 ? static_cast<double>(aggregate.total()) / s : 0.0;
}

std::uint64_t fold_seed(std::uint64_t seed, PipelineId id, std::size_t fold) {
    return derive_seed(derive_seed(seed, static_cast<std::uint64_t>(id) + 1), fold);
}

namespace {

template <typename T>
std::vector<T> pick(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

Eigen::MatrixXd rows(const Eigen::MatrixXd& X, const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(idx[r]));
    return out;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

FoldResult run_fold(const FeatureMatrix& X, const Fold& fold, PipelineId id, const PipelineConfig& cfg,
                    std::uint64_t seed) {
    FoldResult r;
    auto t0 = Clock::now();
    const FittedPipeline fp = fit_fold(X, fold, id, cfg, seed);
    r.train_seconds = seconds_since(t0);

    const Eigen::MatrixXd X_test = rows(X.values, fold.test);
    t0 = Clock::now();
    const auto pred = fp.classify(X_test);
    r.predict_seconds = seconds_since(t0);

    const auto truth = pick(X.labels, fold.test);
    r.cm = confusion(truth, pred);
    r.metrics = metrics(r.cm);
    r.pca_retained = fp.pca ? fp.pca->retained : 0;
    r.ann = fp.ann_summary;
    if (const auto* svm = std::get_if<SvmModel<double>>(&fp.classifier))
        r.support_vectors = static_cast<std::size_t>(svm->alphas.size());
    return r;
}

}  // namespace

FittedPipeline fit_fold(const FeatureMatrix& X, const Fold& fold, PipelineId id, const PipelineConfig& cfg,
                        std::uint64_t seed) {
    require(X.kind == feature_kind(id), ErrorKind::InvalidArgument,
            to_string(id) + " needs " + to_string(feature_kind(id)) + " features");
    return fit_pipeline(id, rows(X.values, fold.train), pick(X.labels, fold.train), rows(X.values, fold.val),
                        pick(X.labels, fold.val), cfg, seed);
}

EvalReport evaluate_pipeline(const FeatureMatrix& X, std::span<const Fold> folds, PipelineId id,
                             const PipelineConfig& cfg, std::uint64_t seed, int threads) {
    require(!folds.empty(), ErrorKind::InvalidArgument, "evaluate_pipeline: no folds");
    EvalReport report;
    report.pipeline = id;
    report.seed = seed;
    report.config = pipeline_config_to_json(cfg);
    report.folds.resize(folds.size());

    std::vector<std::exception_ptr> failures(folds.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t f = next++; f < folds.size(); f = next++) {
            try {
                report.folds[f] = run_fold(X, folds[f], id, cfg, fold_seed(seed, id, f));
            } catch (...) {
                failures[f] = std::current_exception();
            }
        }
    };
    const auto n_threads = static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(folds.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    for (std::size_t f = 0; f < failures.size(); ++f) {
        if (!failures[f]) continue;
        try {
            std::rethrow_exception(failures[f]);
        } catch (const Error& e) {
            throw Error(e.kind(), to_string(id) + " fold " + std::to_string(f) + ": " + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorKind::InvalidArgument, to_string(id) + " fold " + std::to_string(f) + ": " + e.what());
        }
    }

    for (const auto& f : report.folds) report.aggregate += f.cm;
    report.overall = metrics(report.aggregate);
    return report;
}

void CrossValidationConfig::validate() const {
    pipeline.validate();
    require(folds >= 2, ErrorKind::InvalidArgument, "folds must be >= 2");
    require(val_fraction >= 0.0 && val_fraction < 1.0, ErrorKind::InvalidArgument, "val_fraction must lie in [0, 1)");
    require(threads >= 1, ErrorKind::InvalidArgument, "threads must be >= 1");
}

namespace {

std::vector<EvalReport> run_all(const std::vector<Label>& labels, std::span<const PipelineId> pipelines,
                                const CrossValidationConfig& cfg, std::uint64_t seed,
                                const std::function<FeatureMatrix(FeatureKind)>& features) {
    cfg.validate();
    require(!pipelines.empty(), ErrorKind::InvalidArgument, "cross_validate: no pipelines");
    const auto folds = stratified_split(labels, cfg.folds, cfg.val_fraction, seed);

    std::optional<FeatureMatrix> gray, vaf;
    std::vector<EvalReport> reports;
    for (PipelineId id : pipelines) {
        auto& slot = feature_kind(id) == FeatureKind::VAF ? vaf : gray;
        if (!slot) slot = features(feature_kind(id));
        EvalReport r = evaluate_pipeline(*slot, folds, id, cfg.pipeline, seed, cfg.threads);
        r.config["folds"] = cfg.folds;
        r.config["val_fraction"] = cfg.val_fraction;
        r.notes.push_back("split: each fold tests on 1/" + std::to_string(cfg.folds) +
                          " of the subjects; the rest is split into train and validation with validation = " +
                          std::to_string(cfg.val_fraction) + " of all subjects");
        r.notes.push_back("PCA, standardization and classifier are refit on the training slice of every fold");
        if (uses_svm(id)) r.notes.push_back("validation slice unused (SVM has no early stopping)");
        else r.notes.push_back("validation slice used for early stopping; best-validation weights kept");
        if (id == PipelineId::VAF_SVM) r.notes.push_back("VAF-SVM reuses the PCA-SVM kernel and box constraint");
        r.notes.push_back("total_cost is the raw misclassification count");
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace

std::vector<EvalReport> cross_validate(std::span<const Volume> volumes, std::span<const Label> labels,
                                       std::span<const PipelineId> pipelines, const CrossValidationConfig& cfg,
                                       std::uint64_t seed) {
    std::vector<Label> lab(labels.begin(), labels.end());
    return run_all(lab, pipelines, cfg, seed, [&](FeatureKind kind) {
        FeatureConfig fc = cfg.pipeline.features;
        fc.kind = kind;
        return build_feature_matrix(volumes, labels, fc);
    });
}

std::vector<EvalReport> cross_validate(const std::filesystem::path& manifest, std::span<const PipelineId> pipelines,
                                       const CrossValidationConfig& cfg, std::uint64_t seed) {
    const Manifest m = read_manifest(manifest);
    require(!m.rows.empty(), ErrorKind::InvalidArgument, "manifest '" + manifest.string() + "' has no rows");
    std::vector<Volume> volumes;
    volumes.reserve(m.rows.size());
    for (const auto& row : m.rows) volumes.push_back(load_volume(m.resolve(row), row.subject_id));
    const auto labels = m.labels();
    return cross_validate(volumes, labels, pipelines, cfg, seed);
}

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json cm_json(const ConfusionMatrix& cm, const Metrics& m) {
    return {{"tp", cm.tp},
            {"fn", cm.fn},
            {"fp", cm.fp},
            {"tn", cm.tn},
            {"accuracy", m.accuracy},
            {"sensitivity", opt_json(m.sensitivity)},
            {"specificity", opt_json(m.specificity)}};
}

}  // namespace

json report_to_json(const EvalReport& r, bool include_timing) {
    json folds = json::array();
    for (std::size_t f = 0; f < r.folds.size(); ++f) {
        const FoldResult& fr = r.folds[f];
        json j = cm_json(fr.cm, fr.metrics);
        j["fold"] = f;
        if (uses_pca(r.pipeline)) j["pca_retained"] = fr.pca_retained;
        if (uses_svm(r.pipeline)) j["support_vectors"] = fr.support_vectors;
        if (fr.ann)
            j["ann"] = {{"iterations", fr.ann->iterations},
                        {"best_iteration", fr.ann->best_iteration},
                        {"stop", to_string(fr.ann->stop)},
                        {"final_train_sse", fr.ann->final_train_sse}};
        folds.push_back(std::move(j));
    }
    json agg = cm_json(r.aggregate, r.overall);
    agg["total_cost"] = r.aggregate.errors();

    json out = {{"pipeline", to_string(r.pipeline)},
                {"seed", r.seed},
                {"folds", folds},
                {"aggregate", agg},
                {"config", r.config},
                {"notes", r.notes}};
    if (include_timing) {
        json per_fold = json::array();
        for (const auto& f : r.folds)
            per_fold.push_back({{"train_seconds", f.train_seconds}, {"predict_seconds", f.predict_seconds}});
        out["timing"] = {{"training_time_sec", r.train_seconds()},
                         {"prediction_speed_obs_per_sec", r.predict_throughput()},
                         {"threads_note", "fold results are independent of the thread count"},
                         {"folds", per_fold}};
    }
    return out;
}

json reports_to_json(std::span<const EvalReport> reports, bool include_timing) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r, include_timing));
    return {{"version", 1}, {"reports", arr}};
}

void write_report_csv(std::span<const EvalReport> reports, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    const auto cell = [](const std::optional<double>& v) {
        if (!v) return std::string();
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", *v);
        return std::string(buf);
    };
    const auto line = [&](const std::string& pipeline, const std::string& fold, const ConfusionMatrix& cm,
                          const Metrics& m) {
        out << pipeline << ',' << fold << ',' << cm.tp << ',' << cm.fn << ',' << cm.fp << ',' << cm.tn << ','
            << cell(m.accuracy) << ',' << cell(m.sensitivity) << ',' << cell(m.specificity) << '\n';
    };
    out << "pipeline,fold,tp,fn,fp,tn,accuracy,sensitivity,specificity\n";
    for (const auto& r : reports) {
        for (std::size_t f = 0; f < r.folds.size(); ++f)
            line(to_string(r.pipeline), std::to_string(f), r.folds[f].cm, r.folds[f].metrics);
        line(to_string(r.pipeline), "all", r.aggregate, r.overall);
    }
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace adcad
