// csmcover: select representative cover sources from a pipeline grid.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csmcover/errors.hpp"
#include "csmcover/experiment.hpp"
#include "csmcover/feature_io.hpp"
#include "csmcover/util.hpp"

using namespace csmcover;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

void emit(const std::string& text, const std::string& out, bool force) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    ensure_writable(out, force);
    write_text_file(out, text);
}

std::string or_default(const std::string& value, const std::filesystem::path& fallback) {
    return value.empty() ? fallback.string() : value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Greedy set covering of cover sources under a regret budget"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string workdir;
    bool force = false;
    app.add_option("--seed", seed, "Master seed (overrides the config)");
    app.add_option("--config", config_path, "Experiment config (JSON)");
    app.add_option("--workdir", workdir, "Directory for outputs");
    app.add_flag("--force", force, "Overwrite existing outputs");

    std::string out;
    std::vector<std::string> pins;

    auto* grid = app.add_subcommand("grid", "Write the 243-entry pipeline directory");
    grid->add_option("--out", out, "Output path (default <workdir>/grid.json)");

    auto* simulate = app.add_subcommand("simulate", "Simulate feature files for the selected pipelines");
    simulate->add_option("--out", out, "Output CSV (default <workdir>/features.csv)");
    simulate->add_option("--pin", pins, "Restrict to a sub-grid, e.g. --pin denoising=1");

    std::string features;
    std::optional<double> ridge;
    bool show_table = false;
    auto* regret = app.add_subcommand("regret", "Train detectors and build the regret matrix");
    regret->add_option("--features", features, "Feature CSV file or directory")->required();
    regret->add_option("--out", out, "Output CSV (default <workdir>/regret.csv)");
    regret->add_option("--ridge", ridge, "Ridge regularization of the detector");
    regret->add_flag("--table", show_table, "Print the matrix in percent");

    std::string matrix;
    double epsilon = 0.0;
    std::optional<std::size_t> min_cover;
    ExactOptions exact;
    auto* cover = app.add_subcommand("cover", "Greedy covering of a regret matrix");
    cover->add_option("--matrix", matrix, "Regret matrix CSV")->required();
    cover->add_option("--epsilon", epsilon, "Regret budget as a fraction (0.10 = 10%)")->required()->check(CLI::NonNegativeNumber);
    cover->add_option("--min-cover", min_cover, "Drop representatives covering fewer sources");
    cover->add_option("--node-budget", exact.node_budget, "Exact search node budget");
    cover->add_option("--exact-limit", exact.size_limit, "Largest instance for the exact search");
    cover->add_flag("--exact-override", exact.override_limit, "Run the exact search beyond the limit");
    cover->add_option("--out", out, "Output JSON (default stdout)");

    std::string covering_path;
    std::size_t filter_min = 10;
    auto* filter = app.add_subcommand("filter", "Drop representatives covering few sources");
    filter->add_option("--covering", covering_path, "Covering JSON")->required();
    filter->add_option("--min-cover", filter_min, "Minimum number of covered sources")->check(CLI::PositiveNumber);
    filter->add_option("--out", out, "Output JSON (default stdout)");

    std::optional<std::size_t> pop_n;
    std::optional<std::size_t> pick_k;
    std::size_t variants = 3;
    auto* baseline = app.add_subcommand("baseline", "Random selections of as many sources as a covering");
    baseline->add_option("--covering", covering_path, "Covering JSON giving k and the source universe");
    baseline->add_option("--n", pop_n, "Population size (sources 0..n-1)");
    baseline->add_option("--k", pick_k, "Subset size");
    baseline->add_option("--variants", variants, "Number of random subsets")->check(CLI::PositiveNumber);
    baseline->add_option("--out", out, "Output JSON (default stdout)");

    std::string mode = "greedy-order";
    std::string pareto_out;
    auto* clusters = app.add_subcommand("clusters", "Label sources with their representative");
    clusters->add_option("--covering", covering_path, "Covering JSON (unfiltered)")->required();
    clusters->add_option("--matrix", matrix, "Regret matrix CSV")->required();
    clusters->add_option("--mode", mode, "greedy-order or min-regret");
    clusters->add_option("--pareto", pareto_out, "Also write the Pareto report here");
    clusters->add_option("--out", out, "Output CSV (default stdout)");

    std::string clusters_path;
    ForestConfig forest;
    auto* importance = app.add_subcommand("importance", "Random-forest MDI of pipeline parameters");
    importance->add_option("--clusters", clusters_path, "Cluster labeling CSV")->required();
    importance->add_option("--trees", forest.trees, "Number of trees");
    importance->add_option("--features-per-split", forest.features_per_split, "Parameters tried per split");
    importance->add_option("--max-depth", forest.max_depth, "Depth limit (0 = unlimited)");
    importance->add_option("--out", out, "Output JSON (default stdout)");

    bool full = false;
    std::vector<double> epsilons;
    auto* run = app.add_subcommand("run", "Full experiment: simulate, regret, cover, analyze");
    run->add_option("--pin", pins, "Restrict to a sub-grid, e.g. --pin demosaicking=0");
    run->add_option("--epsilon", epsilons, "Regret budgets (fractions)");
    run->add_flag("--full", full, "Allow very large runs");

    auto* report = app.add_subcommand("report", "Summarize a finished run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Bad usage is a validation error; --help exits cleanly.
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (!workdir.empty()) cfg.workdir = workdir;
        if (!pins.empty()) cfg.pins = pins;
        if (!epsilons.empty()) cfg.epsilons = epsilons;
        if (full) cfg.allow_full = true;
        if (ridge) cfg.ridge = *ridge;
        validate_experiment(cfg);

        if (*grid) {
            cmd_grid(or_default(out, cfg.workdir / "grid.json"), force);
        } else if (*simulate) {
            cmd_simulate(cfg, or_default(out, cfg.workdir / "features.csv"), force);
        } else if (*regret) {
            nlohmann::ordered_json prov;
            prov["seed"] = cfg.seed;
            prov["config_hash"] = config_hash(cfg);
            prov["ridge"] = cfg.ridge;
            prov["feature_source"] = features;
            const auto m = cmd_regret(features, or_default(out, cfg.workdir / "regret.csv"), cfg.ridge, prov, force);
            if (show_table) std::cout << render_percent_table(m.regret, m.source_ids);
        } else if (*cover) {
            const auto m = load_regret_matrix(matrix);
            const auto r = cover_matrix(m, epsilon, min_cover, exact);
            emit(covering_to_json(min_cover ? r.filtered : r.covering, r.bounds), out, force);
        } else if (*filter) {
            const auto f = covering_from_json(read_text_file(covering_path));
            emit(covering_to_json(filter_representatives(f.covering, filter_min), f.bounds), out, force);
        } else if (*baseline) {
            std::vector<int> universe;
            std::size_t k = 0;
            if (!covering_path.empty()) {
                const auto f = covering_from_json(read_text_file(covering_path));
                universe = f.covering.all_sources();
                k = f.covering.size();
            }
            if (pop_n) {
                universe.clear();
                for (std::size_t i = 0; i < *pop_n; ++i) universe.push_back(static_cast<int>(i));
            }
            if (pick_k) k = *pick_k;
            if (universe.empty()) throw ValidationError("baseline needs --covering or --n");
            auto subsets = random_baseline(universe.size(), k, cfg.seed, variants);
            for (auto& s : subsets) {
                for (auto& p : s) p = universe[static_cast<std::size_t>(p)];
            }
            emit(baselines_to_json(subsets, k, cfg.seed), out, force);
        } else if (*clusters) {
            const auto f = covering_from_json(read_text_file(covering_path));
            const auto m = load_regret_matrix(matrix);
            const auto labels = cluster_sources(f.covering, m, parse_assignment_mode(mode));
            if (!pareto_out.empty()) {
                ensure_writable(pareto_out, force);
                write_text_file(pareto_out, pareto_to_json(pareto_report(labels)));
            }
            emit(labeling_to_csv(labels), out, force);
        } else if (*importance) {
            forest.seed = cfg.seed;
            const auto labels = labeling_from_csv(read_text_file(clusters_path), clusters_path);
            emit(importance_to_json(mdi_importance(labels, enumerate_grid(), forest)), out, force);
        } else if (*run) {
            const auto r = cmd_run(cfg, force);
            std::cout << summary_table(r);
        } else if (*report) {
            std::cout << cmd_report(cfg.workdir);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
