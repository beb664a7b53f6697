#include "adcad/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "adcad/config.hpp"
#include "adcad/eval.hpp"
#include "adcad/serialize.hpp"
#include "adcad/synth.hpp"

namespace adcad {

namespace {

using nlohmann::json;

// Flags shared by extract/train/eval; each overrides the matching field of
// the --config file when given.
struct ConfigFlags {
    std::string config_path;
    std::string block_grid, kind, kernel, trainer, activation, pca_solver;
    int bins = 0, hidden = 0, max_iters = 0, folds = 0, threads = 0, patience = 0;
    double pca_threshold = 0, kernel_scale = 0, C = 0, lambda = 0, val_fraction = 0, lr = 0, momentum = 0;
    bool pca_scale = false;
    std::uint64_t seed = 0;
    std::map<std::string, CLI::Option*> opts;

    void add(CLI::App& app, bool with_cv) {
        opts["config"] = app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        opts["block-grid"] = app.add_option("--block-grid", block_grid, "feature block grid, e.g. 4x4x4");
        opts["bins"] = app.add_option("--bins", bins, "histogram bins for energy/entropy");
        opts["pca-threshold"] = app.add_option("--pca-threshold", pca_threshold, "cumulative contribution to retain");
        opts["pca-scale"] = app.add_flag("--pca-scale", pca_scale, "scale features to unit variance before PCA");
        opts["pca-solver"] = app.add_option("--pca-solver", pca_solver, "auto, direct or gram");
        opts["kernel"] = app.add_option("--kernel", kernel, "SVM kernel: gaussian or linear");
        opts["kernel-scale"] = app.add_option("--kernel-scale", kernel_scale, "Gaussian kernel scale");
        opts["C"] = app.add_option("--C,--box-constraint", C, "SVM box constraint");
        opts["hidden"] = app.add_option("--hidden", hidden, "ANN hidden layer size");
        opts["max-iters"] = app.add_option("--max-iters", max_iters, "ANN iteration limit");
        opts["trainer"] = app.add_option("--trainer", trainer, "ANN trainer: lm or gdm");
        opts["activation"] = app.add_option("--activation", activation, "ANN hidden activation: tansig or relu");
        opts["lambda"] = app.add_option("--lambda", lambda, "ANN L2 regularization strength");
        opts["lr"] = app.add_option("--lr", lr, "GDM learning rate");
        opts["momentum"] = app.add_option("--momentum", momentum, "GDM momentum");
        opts["patience"] = app.add_option("--patience", patience, "ANN validation early-stopping patience");
        opts["seed"] = app.add_option("--seed", seed, "master seed");
        opts["val-fraction"] = app.add_option("--val-fraction", val_fraction, "validation share of all subjects");
        if (with_cv) {
            opts["folds"] = app.add_option("--folds", folds, "cross-validation folds");
            opts["threads"] = app.add_option("--threads", threads, "worker threads (0: all cores)");
        }
    }

    bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }

    RunConfig resolve() const {
        RunConfig c;
        if (given("config")) c = load_run_config(config_path);
        auto& p = c.pipeline;
        if (given("block-grid")) {
            const Dims g = parse_dims(block_grid);
            p.features.block_grid = {g.nx, g.ny, g.nz};
        }
        if (given("bins")) p.features.bins = bins;
        if (given("pca-threshold")) p.pca.cum_threshold = pca_threshold;
        if (given("pca-scale")) p.pca.scale_features = pca_scale;
        if (given("pca-solver")) {
            json j = {{"pca", {{"solver", pca_solver}}}};
            p.pca.solver = run_config_from_json(j).pipeline.pca.solver;
        }
        if (given("kernel")) p.svm.kernel.kind = kernel_kind_from_string(kernel);
        if (given("kernel-scale")) p.svm.kernel.scale = kernel_scale;
        if (given("C")) p.svm.C = C;
        if (given("hidden")) p.ann.hidden = hidden;
        if (given("max-iters")) p.ann.max_iters = max_iters;
        if (given("trainer")) p.ann.trainer = trainer_from_string(trainer);
        if (given("activation")) p.ann.activation = activation_from_string(activation);
        if (given("lambda")) p.ann.lambda = lambda;
        if (given("lr")) p.ann.lr = lr;
        if (given("momentum")) p.ann.momentum = momentum;
        if (given("patience")) p.ann.patience = patience;
        if (given("seed")) c.seed = seed;
        if (given("val-fraction")) c.val_fraction = val_fraction;
        if (given("folds")) c.folds = folds;
        if (given("threads")) c.threads = threads;
        c.validate();
        return c;
    }
};

int run_synth(const SynthConfig& cfg, const std::string& out_dir, std::ostream& out) {
    const auto manifest = generate_dataset(cfg, out_dir);
    out << "wrote " << cfg.size() << " volumes (" << cfg.n_ad << " AD, " << cfg.n_hc << " HC) and "
        << manifest.string() << '\n';
    return 0;
}

// Stratified holdout of val_fraction for ANN early stopping.
FittedPipeline train_full(const FeatureMatrix& X, PipelineId id, const RunConfig& cfg) {
    if (uses_svm(id) || cfg.val_fraction == 0.0) {
        return fit_pipeline(id, X.values, X.labels, Eigen::MatrixXd(0, X.cols()), {}, cfg.pipeline, cfg.seed);
    }
    // One "fold" whose test slice is empty: reuse the splitter with k = 2 and
    // merge the test half back into training.
    auto folds = stratified_split(X.labels, 2, cfg.val_fraction, cfg.seed);
    Fold f = folds[0];
    f.train.insert(f.train.end(), f.test.begin(), f.test.end());
    std::sort(f.train.begin(), f.train.end());
    f.test.clear();
    return fit_fold(X, f, id, cfg.pipeline, cfg.seed);
}

PipelineId pipeline_for(const std::string& pipeline, const std::string& model, const std::string& features) {
    if (!pipeline.empty()) return pipeline_from_string(pipeline);
    const bool vaf = features == "vaf" || features == "VAF";
    if (!features.empty() && !vaf && features != "grayscale" && features != "GRAYSCALE")
        throw Error(ErrorKind::InvalidArgument, "unknown feature kind '" + features + "'");
    if (model == "ann") {
        require(!vaf, ErrorKind::InvalidArgument, "the ANN pipeline uses PCA features; VAF is SVM-only");
        return PipelineId::PCA_ANN;
    }
    if (model == "svm" || model.empty()) return vaf ? PipelineId::VAF_SVM : PipelineId::PCA_SVM;
    throw Error(ErrorKind::InvalidArgument, "unknown model '" + model + "' (expected svm or ann)");
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Computer-aided diagnosis pipeline: features, PCA, SVM/ANN, cross-validation", "adcad"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    // synth
    SynthConfig synth_cfg;
    std::string synth_out, synth_dims = "34x47x39";
    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic AD/HC volume cohort");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--n-ad", synth_cfg.n_ad, "number of AD subjects")->capture_default_str();
    synth->add_option("--n-hc", synth_cfg.n_hc, "number of HC subjects")->capture_default_str();
    synth->add_option("--dims", synth_dims, "volume dims NXxNYxNZ")->capture_default_str();
    synth->add_option("--seed", synth_cfg.seed, "generator seed")->capture_default_str();
    synth->add_option("--separation", synth_cfg.separation, "AD shift in units of noise sigma")->capture_default_str();
    synth->add_option("--noise-sigma", synth_cfg.noise_sigma, "voxel noise standard deviation")->capture_default_str();

    // extract
    std::string ex_manifest, ex_out, ex_kind = "grayscale";
    ConfigFlags ex_flags;
    auto* extract = app.add_subcommand("extract", "write the feature matrix of a manifest as CSV");
    extract->add_option("--manifest", ex_manifest, "manifest CSV")->required()->check(CLI::ExistingFile);
    extract->add_option("--kind", ex_kind, "grayscale or vaf")->capture_default_str();
    extract->add_option("--out", ex_out, "output CSV")->required();
    ex_flags.add(*extract, false);

    // train
    std::string tr_manifest, tr_out, tr_pipeline, tr_model, tr_features;
    ConfigFlags tr_flags;
    auto* train = app.add_subcommand("train", "fit one pipeline on every subject of a manifest");
    train->add_option("--manifest", tr_manifest, "manifest CSV")->required();
    train->add_option("--out", tr_out, "model JSON to write")->required();
    train->add_option("--pipeline", tr_pipeline, "pca-svm, pca-ann or vaf-svm");
    train->add_option("--model", tr_model, "svm or ann (alternative to --pipeline)");
    train->add_option("--features", tr_features, "grayscale or vaf (with --model)");
    tr_flags.add(*train, false);

    // eval
    std::string ev_manifest, ev_report, ev_csv, ev_pipelines = "pca-svm,pca-ann,vaf-svm";
    ConfigFlags ev_flags;
    auto* eval = app.add_subcommand("eval", "stratified k-fold comparison of pipelines");
    eval->add_option("--manifest", ev_manifest, "manifest CSV")->required();
    eval->add_option("--pipelines", ev_pipelines, "comma-separated pipeline ids")->capture_default_str();
    eval->add_option("--report", ev_report, "JSON report to write")->required();
    eval->add_option("--csv", ev_csv, "per-fold confusion CSV to write");
    ev_flags.add(*eval, true);

    // predict
    std::string pr_model, pr_volume;
    auto* predict = app.add_subcommand("predict", "classify one RVOL volume with a trained model");
    predict->add_option("--model", pr_model, "model JSON from train")->required();
    predict->add_option("--volume", pr_volume, "RVOL file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run with --help for usage\n";
        return 2;
    }

    try {
        if (synth->parsed()) {
            synth_cfg.dims = parse_dims(synth_dims);
            synth_cfg.validate();
            return run_synth(synth_cfg, synth_out, out);
        }
        if (extract->parsed()) {
            RunConfig cfg = ex_flags.resolve();
            FeatureConfig fc = cfg.pipeline.features;
            fc.kind = feature_kind_from_string(ex_kind);
            const FeatureMatrix fm = build_feature_matrix(ex_manifest, fc);
            write_feature_csv(fm, ex_out);
            out << "wrote " << fm.rows() << " x " << fm.cols() << " " << to_string(fc.kind) << " features to " << ex_out
                << '\n';
            return 0;
        }
        if (train->parsed()) {
            const RunConfig cfg = tr_flags.resolve();
            const PipelineId id = pipeline_for(tr_pipeline, tr_model, tr_features);
            FeatureConfig fc = cfg.pipeline.features;
            fc.kind = feature_kind(id);
            const FeatureMatrix fm = build_feature_matrix(tr_manifest, fc);
            const FittedPipeline fp = train_full(fm, id, cfg);
            json j = pipeline_to_json(fp);
            j["config"] = run_config_to_json(cfg);
            write_json(j, tr_out);
            out << "trained " << to_string(id) << " on " << fm.rows() << " subjects";
            if (fp.pca) out << " (" << fp.pca->retained << " principal components)";
            out << "; model written to " << tr_out << '\n';
            return 0;
        }
        if (eval->parsed()) {
            const RunConfig cfg = ev_flags.resolve();
            const auto pipelines = parse_pipeline_list(ev_pipelines);
            const auto reports = cross_validate(ev_manifest, pipelines, cfg.cross_validation(), cfg.seed);
            json j = reports_to_json(reports);
            j["config"] = run_config_to_json(cfg);
            for (auto& rep : j["reports"]) rep["config"] = j["config"];
            write_json(j, ev_report);
            if (!ev_csv.empty()) write_report_csv(reports, ev_csv);
            for (const auto& r : reports) {
                out << to_string(r.pipeline) << ": accuracy " << r.overall.accuracy;
                if (r.overall.sensitivity) out << ", sensitivity " << *r.overall.sensitivity;
                if (r.overall.specificity) out << ", specificity " << *r.overall.specificity;
                out << ", total cost " << r.aggregate.errors() << '\n';
            }
            return 0;
        }
        if (predict->parsed()) {
            const FittedPipeline fp = pipeline_from_json(read_json(pr_model));
            const Volume v = load_volume(pr_volume);
            const Eigen::VectorXd x = extract_features(v, fp.features);
            const double score = fp.decision(x.transpose())(0);
            out << to_string(label_from_score(score)) << ' ' << score << '\n';
            return 0;
        }
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace adcad
