#include <doctest.h>

#include "adcad/cli.hpp"
#include "adcad/manifest.hpp"
#include "adcad/serialize.hpp"
#include "support.hpp"

#include <fstream>
#include <sstream>

using testing_support::TempDir;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "adcad");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = adcad::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Small cohort shared by the slower cases.
const TempDir& cohort() {
    static TempDir dir("cli");
    static bool made = false;
    if (!made) {
        const auto r = run({"synth", "--out", dir.path().string(), "--n-ad", "14", "--n-hc", "11", "--dims",
                            "8x8x8", "--seed", "4", "--separation", "4"});
        REQUIRE(r.code == 0);
        made = true;
    }
    return dir;
}

std::string manifest() { return (cohort() / "manifest.csv").string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth writes the default-size cohort") {
    TempDir dir("cli");
    const auto r = run({"synth", "--out", dir.path().string(), "--n-ad", "210", "--n-hc", "90", "--dims", "34x47x39",
                        "--seed", "42"});
    CHECK(r.code == 0);
    const auto m = adcad::read_manifest(dir / "manifest.csv");
    CHECK(m.rows.size() == 300);
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.path())) files += e.path().extension() == ".rvol";
    CHECK(files == 300);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    const auto r = run({"synth", "--out", "x", "--no-such-flag"});
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
    CHECK(run({"eval", "--manifest", manifest()}).code == 2);  // --report missing
    CHECK(run({"synth", "--out", "x", "--n-ad", "many"}).code == 2);
}

TEST_CASE("help for every subcommand") {
    for (std::string sub : {"synth", "extract", "train", "eval", "predict"}) {
        const auto r = run({sub, "--help"});
        CHECK(r.code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("domain errors exit with 1") {
    TempDir dir("cli");
    auto r = run({"train", "--manifest", manifest(), "--model", "svm", "--kernel", "gaussian", "--kernel-scale", "-1",
                  "--out", (dir / "m.json").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("scale") != std::string::npos);
    CHECK(!std::filesystem::exists(dir / "m.json"));

    r = run({"train", "--manifest", (dir / "missing.csv").string(), "--out", (dir / "m.json").string()});
    CHECK(r.code == 1);
    r = run({"synth", "--out", dir.path().string(), "--separation", "-2"});
    CHECK(r.code == 1);
    r = run({"eval", "--manifest", manifest(), "--report", (dir / "r.json").string(), "--folds", "20"});
    CHECK(r.code == 1);
    r = run({"eval", "--manifest", manifest(), "--report", (dir / "r.json").string(), "--pipelines", "nope"});
    CHECK(r.code == 1);
}

TEST_CASE("extract writes a feature table") {
    TempDir dir("cli");
    auto r = run({"extract", "--manifest", manifest(), "--out", (dir / "f.csv").string(), "--block-grid", "2x2x2"});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "f.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("subject_id,label,f0,", 0) == 0);
    CHECK(header.find("f47") != std::string::npos);
    CHECK(header.find("f48") == std::string::npos);
}

TEST_CASE("train then predict") {
    TempDir dir("cli");
    for (std::string model : {"svm", "ann"}) {
        const auto path = (dir / (model + ".json")).string();
        auto r = run({"train", "--manifest", manifest(), "--model", model, "--out", path, "--block-grid", "2x2x2",
                      "--hidden", "5", "--max-iters", "30"});
        REQUIRE(r.code == 0);
        const auto m = adcad::read_manifest(manifest());
        std::size_t right = 0;
        for (const auto& row : m.rows) {
            r = run({"predict", "--model", path, "--volume", m.resolve(row).string()});
            REQUIRE(r.code == 0);
            std::istringstream line(r.out);
            std::string label;
            double score;
            line >> label >> score;
            CHECK((label == "AD" || label == "HC"));
            CHECK((label == "AD") == (score > 0));
            right += label == adcad::to_string(row.label);
        }
        CAPTURE(model);
        CHECK(right >= m.rows.size() - 2);
    }
    CHECK(run({"predict", "--model", (dir / "svm.json").string(), "--volume", (dir / "none.rvol").string()}).code == 1);
}

TEST_CASE("eval report echoes the effective config") {
    TempDir dir("cli");
    {
        std::ofstream cfg(dir / "run.json");
        cfg << R"({"folds": 5, "seed": 3, "svm": {"C": 2.0, "scale": 9.0}, "features": {"block_grid": [2, 2, 2]}})";
    }
    const auto report = (dir / "r.json").string();
    const auto r = run({"eval", "--manifest", manifest(), "--pipelines", "pca-svm,vaf-svm", "--config",
                        (dir / "run.json").string(), "--C", "4", "--report", report, "--csv", (dir / "r.csv").string()});
    REQUIRE(r.code == 0);
    const auto j = adcad::read_json(report);
    REQUIRE(j["reports"].size() == 2);
    const auto& cfg = j["reports"][0]["config"];
    CHECK(cfg["svm"]["C"] == 4.0);                   // flag wins
    CHECK(cfg["svm"]["scale"] == 9.0);     // file value kept
    CHECK(cfg["seed"] == 3);
    CHECK(j["reports"][0]["folds"].size() == 5);
    CHECK(j["reports"][0].contains("aggregate"));
    CHECK(std::filesystem::exists(dir / "r.csv"));
}

TEST_CASE("unknown config keys are rejected") {
    TempDir dir("cli");
    {
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"svm": {"gamma": 1.0}})";
    }
    const auto r = run({"eval", "--manifest", manifest(), "--config", (dir / "bad.json").string(), "--report",
                        (dir / "r.json").string()});
    CHECK(r.code == 1);
}

TEST_CASE("eval output does not depend on thread count") {
    TempDir dir("cli");
    const auto a = (dir / "a.json").string(), b = (dir / "b.json").string();
    const std::vector<std::string> common{"eval", "--manifest", manifest(), "--pipelines", "pca-svm,pca-ann",
                                          "--block-grid", "2x2x2", "--hidden", "4", "--max-iters", "20"};
    auto args = common;
    args.insert(args.end(), {"--threads", "1", "--report", a});
    REQUIRE(run(args).code == 0);
    args = common;
    args.insert(args.end(), {"--threads", "3", "--report", b});
    REQUIRE(run(args).code == 0);
    auto ja = adcad::read_json(a), jb = adcad::read_json(b);
    for (auto* j : {&ja, &jb}) {
        (*j)["config"].erase("threads");
        for (auto& rep : (*j)["reports"]) {
            rep.erase("timing");
            rep["config"].erase("threads");
        }
    }
    CHECK(ja.dump() == jb.dump());
}

}
