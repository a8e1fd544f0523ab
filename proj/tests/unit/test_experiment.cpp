#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "csmcover/errors.hpp"
#include "csmcover/experiment.hpp"
#include "csmcover/util.hpp"

using namespace csmcover;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("csmcover-unit-" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig toy(const fs::path& dir) {
    ExperimentConfig cfg;
    cfg.workdir = dir;
    cfg.pins = {"demosaicking=0", "sharpen_micro=0"};
    cfg.simulator.dimension = 16;
    cfg.simulator.samples_per_class = 60;
    cfg.epsilons = {0.05, 0.2};
    cfg.min_cover = 2;
    cfg.forest.trees = 20;
    cfg.seed = 11;
    return cfg;
}

}  // namespace

TEST_CASE("config JSON round trip") {
    auto cfg = toy("somewhere");
    cfg.assignment = AssignmentMode::MinRegret;
    const auto j = config_to_json(cfg);
    const auto back = config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(config_to_json(back) == j);
    CHECK(config_hash(back) == config_hash(cfg));
    auto other = cfg;
    other.seed = 12;
    CHECK(config_hash(other) != config_hash(cfg));
    other = cfg;
    other.workdir = "elsewhere";
    CHECK(config_hash(other) == config_hash(cfg));
}

TEST_CASE("config validation") {
    auto j = nlohmann::json::parse(config_to_json(ExperimentConfig{}).dump());
    j["epsilonz"] = 1;
    CHECK_THROWS_AS(config_from_json(j), ValidationError);

    ExperimentConfig cfg;
    cfg.epsilons = {0.0};
    CHECK_THROWS_AS(validate_experiment(cfg), ValidationError);
    cfg.epsilons = {1.5};
    CHECK_THROWS_AS(validate_experiment(cfg), ValidationError);
    cfg = ExperimentConfig{};
    cfg.pins = {"denoising=7"};
    CHECK_THROWS_AS(validate_experiment(cfg), ValidationError);
}

TEST_CASE("sub-grid selection") {
    const auto cfg = toy("x");
    CHECK(selected_sources(cfg).size() == 27);
    CHECK(selected_sources(ExperimentConfig{}).size() == 243);
}

TEST_CASE("large runs need explicit permission") {
    ExperimentConfig cfg;
    cfg.workdir = scratch("gate");
    cfg.simulator.dimension = 686;
    cfg.simulator.samples_per_class = 5000;
    CHECK(estimated_work(243, cfg.simulator) > kFullRunWorkThreshold);
    CHECK_THROWS_AS(cmd_run(cfg, false), ValidationError);
    CHECK_FALSE(fs::exists(cfg.workdir / "regret.csv"));
}

TEST_CASE("run writes a complete, reproducible tree") {
    const auto a = scratch("run-a");
    const auto b = scratch("run-b");
    const auto ra = cmd_run(toy(a), false);
    cmd_run(toy(b), false);
    CHECK_FALSE(fs::exists(a / "INCOMPLETE"));
    for (const auto* f : {"config.json", "grid.json", "regret.csv", "regret.json", "summary.csv", "summary.txt"}) {
        CAPTURE(f);
        CHECK(fs::exists(a / f));
    }
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        ++files;
        const auto rel = fs::relative(e.path(), a);
        CAPTURE(rel.string());
        REQUIRE(fs::exists(b / rel));
        CHECK(read_text_file(e.path()) == read_text_file(b / rel));
    }
    CHECK(files > 10);
    CHECK(ra.regret.size() == 27);
    CHECK(ra.per_epsilon.size() == 2);
    CHECK(ra.per_epsilon[1].cover.covering.size() <= ra.per_epsilon[0].cover.covering.size());

    CHECK_THROWS_AS(cmd_run(toy(a), false), ValidationError);
    CHECK_NOTHROW(cmd_run(toy(a), true));

    const auto text = cmd_report(a);
    CHECK(text.find("representatives") != std::string::npos);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("report on a missing directory") {
    CHECK_THROWS(cmd_report(scratch("nothing-here")));
}
