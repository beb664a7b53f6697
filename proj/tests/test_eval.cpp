#include <doctest.h>

#include "adcad/error.hpp"
#include "adcad/eval.hpp"
#include "adcad/serialize.hpp"
#include "adcad/synth.hpp"
#include "support.hpp"

#include <numeric>
#include <set>

using namespace adcad;
using testing_support::TempDir;

namespace {

std::vector<Label> make_labels(std::size_t n_ad, std::size_t n_hc) {
    std::vector<Label> y(n_ad, Label::AD);
    y.insert(y.end(), n_hc, Label::HC);
    return y;
}

struct Cohort {
    SynthCohort data;
    FeatureMatrix gray, vaf;
};

Cohort small_cohort(double separation, std::uint64_t seed = 3) {
    SynthConfig cfg;
    cfg.n_ad = 21;
    cfg.n_hc = 14;
    cfg.dims = Dims{12, 10, 8};
    cfg.separation = separation;
    cfg.seed = seed;
    Cohort c{generate_cohort(cfg), {}, {}};
    FeatureConfig g;
    g.block_grid = BlockGrid{2, 2, 2};
    c.gray = build_feature_matrix(c.data.volumes, c.data.labels, g);
    FeatureConfig v;
    v.kind = FeatureKind::VAF;
    c.vaf = build_feature_matrix(c.data.volumes, c.data.labels, v);
    return c;
}

PipelineConfig fast_config() {
    PipelineConfig cfg;
    cfg.features.block_grid = BlockGrid{2, 2, 2};
    cfg.ann.hidden = 8;
    cfg.ann.max_iters = 50;
    return cfg;
}

std::size_t count(const std::vector<std::size_t>& idx, const std::vector<Label>& y, Label l) {
    return static_cast<std::size_t>(std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return y[i] == l; }));
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("stratified folds on the full cohort") {
    const auto y = make_labels(210, 90);
    const auto folds = stratified_split(y, 5, 0.10, 11);
    REQUIRE(folds.size() == 5);
    std::vector<int> seen(300, 0);
    for (const auto& f : folds) {
        CHECK(count(f.test, y, Label::AD) == 42);
        CHECK(count(f.test, y, Label::HC) == 18);
        CHECK(f.val.size() == 30);
        CHECK(f.train.size() == 210);
        for (auto i : f.test) seen[i]++;
        std::set<std::size_t> all(f.train.begin(), f.train.end());
        all.insert(f.val.begin(), f.val.end());
        all.insert(f.test.begin(), f.test.end());
        CHECK(all.size() == 300);
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST_CASE("stratification within one per class") {
    std::mt19937_64 gen(4);
    for (int t = 0; t < 30; ++t) {
        const auto n_ad = static_cast<std::size_t>(testing_support::random_int(gen, 5, 80));
        const auto n_hc = static_cast<std::size_t>(testing_support::random_int(gen, 5, 80));
        const int k = testing_support::random_int(gen, 2, 5);
        const auto y = make_labels(n_ad, n_hc);
        const auto folds = stratified_split(y, k, 0.1, gen());
        for (const auto& f : folds) {
            CHECK(std::abs(double(count(f.test, y, Label::AD)) - double(n_ad) / k) < 1.0);
            CHECK(std::abs(double(count(f.test, y, Label::HC)) - double(n_hc) / k) < 1.0);
        }
    }
}

TEST_CASE("balanced ten with five folds") {
    const auto y = make_labels(5, 5);
    for (const auto& f : stratified_split(y, 5, 0.1, 1)) {
        CHECK(f.test.size() == 2);
        CHECK(count(f.test, y, Label::AD) == 1);
    }
}

TEST_CASE("split errors") {
    CHECK_THROWS_AS(stratified_split(make_labels(10, 3), 5, 0.1, 1), Error);
    CHECK_THROWS_AS(stratified_split(make_labels(10, 10), 1, 0.1, 1), Error);
    CHECK_THROWS_AS(stratified_split(make_labels(10, 10), 5, 1.0, 1), Error);
}

TEST_CASE("split depends only on the seed") {
    const auto y = make_labels(30, 20);
    const auto a = stratified_split(y, 5, 0.1, 9), b = stratified_split(y, 5, 0.1, 9), c = stratified_split(y, 5, 0.1, 10);
    bool differs = false;
    for (std::size_t f = 0; f < 5; ++f) {
        CHECK(a[f].test == b[f].test);
        CHECK(a[f].val == b[f].val);
        differs |= a[f].test != c[f].test;
    }
    CHECK(differs);
}

TEST_CASE("confusion counts") {
    const std::vector<Label> truth{Label::AD, Label::AD, Label::HC, Label::HC};
    const std::vector<Label> pred{Label::AD, Label::HC, Label::HC, Label::AD};
    CHECK(confusion(truth, pred) == ConfusionMatrix{1, 1, 1, 1});

    const auto same = confusion(truth, truth);
    CHECK(same.fp == 0);
    CHECK(same.fn == 0);
    std::vector<Label> inverted;
    for (auto l : truth) inverted.push_back(l == Label::AD ? Label::HC : Label::AD);
    const auto inv = confusion(truth, inverted);
    CHECK(inv.tp == 0);
    CHECK(inv.tn == 0);
    CHECK_THROWS_AS(confusion(truth, std::vector<Label>{Label::AD}), Error);
}

TEST_CASE("metrics") {
    const auto m = metrics(ConfusionMatrix{9, 1, 2, 8});
    CHECK(m.accuracy == doctest::Approx(0.85).epsilon(1e-15));
    CHECK(*m.sensitivity == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(*m.specificity == doctest::Approx(0.8).epsilon(1e-15));

    const auto perfect = metrics(ConfusionMatrix{5, 0, 0, 7});
    CHECK(perfect.accuracy == 1.0);
    CHECK(*perfect.sensitivity == 1.0);
    CHECK(*perfect.specificity == 1.0);

    const auto no_pos = metrics(ConfusionMatrix{0, 0, 2, 8});
    CHECK(!no_pos.sensitivity.has_value());
    CHECK(no_pos.specificity.has_value());
    CHECK(no_pos.accuracy == 0.8);
    CHECK_THROWS_AS(metrics(ConfusionMatrix{}), Error);
}

TEST_CASE("metrics match a naive recount") {
    std::mt19937_64 gen(55);
    for (int t = 0; t < 200; ++t) {
        const int n = testing_support::random_int(gen, 1, 40);
        std::vector<Label> a, b;
        for (int i = 0; i < n; ++i) {
            a.push_back(gen() & 1 ? Label::AD : Label::HC);
            b.push_back(gen() & 1 ? Label::AD : Label::HC);
        }
        int tp = 0, tn = 0, pos = 0, neg = 0;
        for (int i = 0; i < n; ++i) {
            if (a[i] == Label::AD) {
                ++pos;
                tp += b[i] == Label::AD;
            } else {
                ++neg;
                tn += b[i] == Label::HC;
            }
        }
        const auto m = metrics(confusion(a, b));
        CHECK(m.accuracy == double(tp + tn) / n);
        CHECK(m.sensitivity.has_value() == (pos > 0));
        if (pos) CHECK(*m.sensitivity == double(tp) / pos);
        if (neg) CHECK(*m.specificity == double(tn) / neg);
    }
}

TEST_CASE("fitted models ignore test rows") {
    const Cohort c = small_cohort(3.0);
    const auto cfg = fast_config();
    const auto folds = stratified_split(c.data.labels, 5, 0.1, 21);
    for (PipelineId id : {PipelineId::PCA_SVM, PipelineId::PCA_ANN, PipelineId::VAF_SVM}) {
        const FeatureMatrix& X = feature_kind(id) == FeatureKind::VAF ? c.vaf : c.gray;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            const auto seed = fold_seed(7, id, f);
            const std::string before = pipeline_to_json(fit_fold(X, folds[f], id, cfg, seed)).dump();
            FeatureMatrix mutated = X;
            for (auto i : folds[f].test) mutated.values.row(static_cast<Eigen::Index>(i)).array() += 1e3;
            const std::string after = pipeline_to_json(fit_fold(mutated, folds[f], id, cfg, seed)).dump();
            CAPTURE(to_string(id));
            CHECK(before == after);
        }
    }
}

TEST_CASE("validation rows matter only for the network") {
    const Cohort c = small_cohort(3.0);
    const auto cfg = fast_config();
    const auto folds = stratified_split(c.data.labels, 5, 0.1, 21);
    FeatureMatrix mutated = c.gray;
    for (auto i : folds[0].val) mutated.values.row(static_cast<Eigen::Index>(i)).array() += 1e3;
    const auto svm_a = pipeline_to_json(fit_fold(c.gray, folds[0], PipelineId::PCA_SVM, cfg, 1)).dump();
    const auto svm_b = pipeline_to_json(fit_fold(mutated, folds[0], PipelineId::PCA_SVM, cfg, 1)).dump();
    CHECK(svm_a == svm_b);
}

TEST_CASE("reports are reproducible and thread independent") {
    const Cohort c = small_cohort(2.0);
    CrossValidationConfig cfg;
    cfg.pipeline = fast_config();
    const std::vector<PipelineId> ids{PipelineId::PCA_SVM, PipelineId::PCA_ANN, PipelineId::VAF_SVM};
    cfg.threads = 1;
    const auto a = cross_validate(c.data.volumes, c.data.labels, ids, cfg, 5);
    cfg.threads = 4;
    const auto b = cross_validate(c.data.volumes, c.data.labels, ids, cfg, 5);
    CHECK(reports_to_json(a, false).dump() == reports_to_json(b, false).dump());
    CHECK(reports_to_json(a, true).contains("reports"));
    CHECK(report_to_json(a[0], true).contains("timing"));
    CHECK(!report_to_json(a[0], false).contains("timing"));

    for (const auto& r : a) {
        ConfusionMatrix sum;
        std::size_t tested = 0;
        for (const auto& f : r.folds) {
            sum += f.cm;
            tested += f.cm.total();
            CHECK(f.metrics.accuracy == metrics(f.cm).accuracy);
        }
        CHECK(sum == r.aggregate);
        CHECK(tested == c.data.labels.size());
        const auto m = metrics(sum);
        CHECK(m.accuracy == r.overall.accuracy);
        CHECK(m.sensitivity == r.overall.sensitivity);
        CHECK(m.specificity == r.overall.specificity);
        CHECK(report_to_json(r, false)["aggregate"]["total_cost"] == r.aggregate.fn + r.aggregate.fp);
    }
}

TEST_CASE("report csv") {
    const Cohort c = small_cohort(2.0);
    CrossValidationConfig cfg;
    cfg.pipeline = fast_config();
    const std::vector<PipelineId> ids{PipelineId::PCA_SVM};
    const auto reports = cross_validate(c.data.volumes, c.data.labels, ids, cfg, 5);
    TempDir dir("eval");
    write_report_csv(reports, dir / "r.csv");
    std::string text;
    REQUIRE(testing_support::read_file(dir / "r.csv", text));
    CHECK(text.rfind("pipeline,fold,tp,fn,fp,tn,accuracy,sensitivity,specificity\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
    CHECK(text.find("PCA-SVM,all,") != std::string::npos);
}

TEST_CASE("serialized pipelines predict identically") {
    const Cohort c = small_cohort(3.0);
    const auto cfg = fast_config();
    const auto folds = stratified_split(c.data.labels, 5, 0.1, 2);
    for (PipelineId id : {PipelineId::PCA_SVM, PipelineId::PCA_ANN, PipelineId::VAF_SVM}) {
        const FeatureMatrix& X = feature_kind(id) == FeatureKind::VAF ? c.vaf : c.gray;
        const auto fitted = fit_fold(X, folds[0], id, cfg, 3);
        TempDir dir("model");
        write_json(pipeline_to_json(fitted), dir / "m.json");
        const auto back = pipeline_from_json(read_json(dir / "m.json"));
        CHECK(back.id == id);
        CHECK(fitted.decision(X.values) == back.decision(X.values));
        CHECK(pipeline_to_json(back).dump() == pipeline_to_json(fitted).dump());
    }
}

TEST_CASE("pipeline names") {
    CHECK(pipeline_from_string("pca-svm") == PipelineId::PCA_SVM);
    CHECK(pipeline_from_string("PCA-ANN") == PipelineId::PCA_ANN);
    CHECK(to_string(PipelineId::VAF_SVM) == "VAF-SVM");
    CHECK(parse_pipeline_list("pca-svm,pca-ann,vaf-svm").size() == 3);
    CHECK_THROWS_AS(pipeline_from_string("svm"), Error);
}

TEST_CASE("separation four keeps PCA-SVM above 0.95") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SynthConfig s;
        s.separation = 4.0;
        s.seed = seed;
        const auto cohort = generate_cohort(s);
        const std::vector<PipelineId> ids{PipelineId::PCA_SVM};
        CrossValidationConfig cfg;
        cfg.threads = 5;
        const auto r = cross_validate(cohort.volumes, cohort.labels, ids, cfg, seed);
        CAPTURE(seed);
        CHECK(r[0].overall.accuracy >= 0.95);
    }
}

}
