#include "csmcover/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "csmcover/errors.hpp"
#include "csmcover/feature_io.hpp"
#include "csmcover/util.hpp"

namespace csmcover {

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("stage ") + name + ": " + e.what());
    } catch (const std::exception& e) {
        throw RuntimeError(std::string("stage ") + name + ": " + e.what());
    }
}

std::string epsilon_dir(double eps) { return "eps_" + format_double(eps); }

std::string percent(double v, int decimals = 1) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(decimals) << 100.0 * v;
    return ss.str();
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ValidationError("unknown config key '" + where + key + "'");
    }
}

}  // namespace

void validate_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg.simulator);
    validate_forest_config(cfg.forest);
    if (!(cfg.ridge > 0.0)) throw ValidationError("ridge must be positive");
    if (cfg.epsilons.empty()) throw ValidationError("at least one epsilon is required");
    for (double e : cfg.epsilons) {
        if (!(e > 0.0 && e < 1.0)) throw ValidationError("epsilon " + format_double(e) + " is outside (0,1)");
    }
    if (cfg.min_cover < 1) throw ValidationError("min_cover must be >= 1");
    if (cfg.baseline_variants < 1) throw ValidationError("baseline_variants must be >= 1");
    for (const auto& p : cfg.pins) parse_pin(p);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["workdir"] = cfg.workdir.string();
    j["features"] = cfg.features.string();
    j["seed"] = cfg.seed;
    j["ridge"] = cfg.ridge;
    j["epsilons"] = cfg.epsilons;
    j["min_cover"] = cfg.min_cover;
    j["baseline_variants"] = cfg.baseline_variants;
    j["pins"] = cfg.pins;
    j["assignment"] = std::string(assignment_mode_name(cfg.assignment));
    j["allow_full"] = cfg.allow_full;
    nlohmann::ordered_json sim;
    sim["dimension"] = cfg.simulator.dimension;
    sim["samples_per_class"] = cfg.simulator.samples_per_class;
    sim["payload_shift"] = cfg.simulator.payload_shift;
    sim["base_noise"] = cfg.simulator.base_noise;
    sim["mean_coupling"] = cfg.simulator.mean_coupling;
    nlohmann::ordered_json sens;
    for (auto p : kAllParameters) sens[std::string(parameter_key(p))] = cfg.simulator.sensitivity_of(p);
    sim["sensitivity"] = std::move(sens);
    j["simulator"] = std::move(sim);
    nlohmann::ordered_json forest;
    forest["trees"] = cfg.forest.trees;
    forest["features_per_split"] = cfg.forest.features_per_split;
    forest["max_depth"] = cfg.forest.max_depth;
    forest["min_leaf"] = cfg.forest.min_leaf;
    j["forest"] = std::move(forest);
    nlohmann::ordered_json exact;
    exact["node_budget"] = cfg.exact.node_budget;
    exact["size_limit"] = cfg.exact.size_limit;
    j["exact"] = std::move(exact);
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (!j.is_object()) throw ValidationError("config must be a JSON object");
        reject_unknown(j, {"workdir", "features", "seed", "ridge", "epsilons", "min_cover", "baseline_variants", "pins",
                           "assignment", "allow_full", "simulator", "forest", "exact"}, "");
        if (j.contains("workdir")) cfg.workdir = j["workdir"].get<std::string>();
        if (j.contains("features")) cfg.features = j["features"].get<std::string>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("ridge")) cfg.ridge = j["ridge"].get<double>();
        if (j.contains("epsilons")) cfg.epsilons = j["epsilons"].get<std::vector<double>>();
        if (j.contains("min_cover")) cfg.min_cover = j["min_cover"].get<std::size_t>();
        if (j.contains("baseline_variants")) cfg.baseline_variants = j["baseline_variants"].get<std::size_t>();
        if (j.contains("pins")) cfg.pins = j["pins"].get<std::vector<std::string>>();
        if (j.contains("assignment")) cfg.assignment = parse_assignment_mode(j["assignment"].get<std::string>());
        if (j.contains("allow_full")) cfg.allow_full = j["allow_full"].get<bool>();
        if (j.contains("simulator")) {
            const auto& s = j["simulator"];
            reject_unknown(s, {"dimension", "samples_per_class", "payload_shift", "base_noise", "mean_coupling",
                               "sensitivity"}, "simulator.");
            if (s.contains("dimension")) cfg.simulator.dimension = s["dimension"].get<int>();
            if (s.contains("samples_per_class")) cfg.simulator.samples_per_class = s["samples_per_class"].get<int>();
            if (s.contains("payload_shift")) cfg.simulator.payload_shift = s["payload_shift"].get<double>();
            if (s.contains("base_noise")) cfg.simulator.base_noise = s["base_noise"].get<double>();
            if (s.contains("mean_coupling")) cfg.simulator.mean_coupling = s["mean_coupling"].get<double>();
            if (s.contains("sensitivity")) {
                for (const auto& [key, value] : s["sensitivity"].items()) {
                    const auto p = parse_parameter(key);
                    if (!p) throw ValidationError("unknown sensitivity parameter '" + key + "'");
                    cfg.simulator.sensitivity_of(*p) = value.get<double>();
                }
            }
        }
        if (j.contains("forest")) {
            const auto& f = j["forest"];
            reject_unknown(f, {"trees", "features_per_split", "max_depth", "min_leaf"}, "forest.");
            if (f.contains("trees")) cfg.forest.trees = f["trees"].get<int>();
            if (f.contains("features_per_split")) cfg.forest.features_per_split = f["features_per_split"].get<int>();
            if (f.contains("max_depth")) cfg.forest.max_depth = f["max_depth"].get<int>();
            if (f.contains("min_leaf")) cfg.forest.min_leaf = f["min_leaf"].get<int>();
        }
        if (j.contains("exact")) {
            const auto& e = j["exact"];
            reject_unknown(e, {"node_budget", "size_limit"}, "exact.");
            if (e.contains("node_budget")) cfg.exact.node_budget = e["node_budget"].get<std::uint64_t>();
            if (e.contains("size_limit")) cfg.exact.size_limit = e["size_limit"].get<std::size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid config: ") + e.what());
    }
    validate_experiment(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
    auto j = config_to_json(cfg);
    j.erase("workdir");
    return hex64(fnv1a64(j.dump()));
}

double estimated_work(std::size_t sources, const SimulatorConfig& sim) {
    const double test = static_cast<double>(sim.samples_per_class - sim.samples_per_class / 2) * 2.0;
    return static_cast<double>(sources) * static_cast<double>(sources) * test * sim.dimension;
}

void ensure_writable(const std::filesystem::path& path, bool force) {
    if (std::filesystem::exists(path) && !force) {
        throw ValidationError(path.string() + " already exists (use --force to overwrite)");
    }
}

void cmd_grid(const std::filesystem::path& out, bool force) {
    ensure_writable(out, force);
    save_directory(enumerate_grid(), out);
}

std::vector<int> selected_sources(const ExperimentConfig& cfg) {
    std::vector<ParameterPin> pins;
    for (const auto& p : cfg.pins) pins.push_back(parse_pin(p));
    return select_subgrid(pins);
}

void cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out, bool force) {
    ensure_writable(out, force);
    auto sim = cfg.simulator;
    sim.seed = cfg.seed;
    save_feature_file(simulate_sources(selected_sources(cfg), sim), out);
}

RegretMatrix cmd_regret(const std::filesystem::path& features, const std::filesystem::path& out, double ridge,
                        const nlohmann::ordered_json& provenance, bool force) {
    ensure_writable(out, force);
    const auto datasets = load_feature_files(features);
    auto m = regret_matrix(datasets, ridge);
    save_regret_matrix(m, out, provenance);
    return m;
}

CoverResult cover_matrix(const RegretMatrix& m, double epsilon, std::optional<std::size_t> min_cover,
                         const ExactOptions& exact) {
    CoverResult r;
    const auto cs = build_cover_sets(m, epsilon);
    r.covering = greedy_cover(cs);
    if (cs.size() <= exact.size_limit || exact.override_limit) {
        r.bounds = exact_cover(cs, exact);
    } else {
        r.bounds = greedy_bounds(cs, r.covering);
    }
    r.filtered = min_cover ? filter_representatives(r.covering, *min_cover) : r.covering;
    return r;
}

std::string baselines_to_json(const std::vector<std::vector<int>>& subsets, std::size_t k, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["k"] = k;
    j["seed"] = seed;
    j["variants"] = subsets;
    return j.dump(2) + "\n";
}

RunResult run_pipeline(const ExperimentConfig& cfg) {
    validate_experiment(cfg);
    RunResult result;
    std::vector<SourceDataset> datasets;
    if (!cfg.features.empty()) {
        datasets = stage("simulate", [&] { return load_feature_files(cfg.features); });
    } else {
        const auto sources = selected_sources(cfg);
        const double work = estimated_work(sources.size(), cfg.simulator);
        if (work > kFullRunWorkThreshold) {
            if (!cfg.allow_full) {
                throw ValidationError("this run evaluates about " + format_double(std::round(work / 1e9)) +
                                      " billion multiply-adds; pass --full (allow_full) to proceed or pin parameters");
            }
            std::cerr << "warning: large run (" << sources.size() << " sources); this can take a long time\n";
        }
        auto sim = cfg.simulator;
        sim.seed = cfg.seed;
        datasets = stage("simulate", [&] { return simulate_sources(sources, sim); });
    }
    result.regret = stage("regret", [&] { return regret_matrix(datasets, cfg.ridge); });
    datasets.clear();

    for (double eps : cfg.epsilons) {
        EpsilonResult er;
        er.epsilon = eps;
        er.cover = stage("cover", [&] { return cover_matrix(result.regret, eps, cfg.min_cover, cfg.exact); });
        er.clusters = stage("clusters", [&] { return cluster_sources(er.cover.covering, result.regret, cfg.assignment); });
        er.pareto = pareto_report(er.clusters);
        if (er.clusters.cluster_sizes.size() >= 2) {
            auto forest = cfg.forest;
            forest.seed = cfg.seed;
            const auto dir = enumerate_grid();
            er.importance = stage("importance", [&] { return mdi_importance(er.clusters, dir, forest); });
        }
        result.per_epsilon.push_back(std::move(er));
    }
    return result;
}

std::string summary_table(const RunResult& r) {
    std::ostringstream out;
    out << "| eps (%) | greedy | lower | exact | filtered | uncovered after filter | top-2 share (%) |\n";
    out << "|---------|--------|-------|-------|----------|------------------------|-----------------|\n";
    for (const auto& e : r.per_epsilon) {
        const auto& p = e.pareto;
        const double top2 = p.cumulative_shares.size() >= 2 ? p.cumulative_shares[1] : p.cumulative_shares.back();
        out << "| " << percent(e.epsilon, 0) << " | " << e.cover.bounds.greedy_size << " | " << e.cover.bounds.lower_bound
            << " | " << (e.cover.bounds.exact_size ? std::to_string(*e.cover.bounds.exact_size) : std::string("-"))
            << " | " << e.cover.filtered.size() << " | " << e.cover.filtered.uncovered.size() << " | " << percent(top2)
            << " |\n";
    }
    return out.str();
}

RunResult cmd_run(const ExperimentConfig& cfg, bool force) {
    validate_experiment(cfg);
    const auto& dir = cfg.workdir;
    const auto marker = dir / "INCOMPLETE";
    if (std::filesystem::exists(dir / "summary.csv") && !force) {
        throw ValidationError(dir.string() + " already holds a run (use --force to overwrite)");
    }
    std::filesystem::create_directories(dir);
    write_text_file(marker, "stage: start\n");
    auto mark = [&](const char* s) { write_text_file(marker, std::string("stage: ") + s + "\n"); };

    mark("grid");
    save_directory(enumerate_grid(), dir / "grid.json");
    // The location is not part of the experiment; leaving it out keeps run
    // trees comparable across directories.
    auto saved = config_to_json(cfg);
    saved.erase("workdir");
    write_text_file(dir / "config.json", saved.dump(2) + "\n");

    mark("pipeline");
    RunResult r = run_pipeline(cfg);

    mark("write");
    nlohmann::ordered_json provenance;
    provenance["seed"] = cfg.seed;
    provenance["config_hash"] = config_hash(cfg);
    provenance["ridge"] = cfg.ridge;
    provenance["feature_source"] = cfg.features.empty() ? "simulator" : cfg.features.string();
    save_regret_matrix(r.regret, dir / "regret.csv", provenance);
    std::string tables = "Regret matrix (%), rows = train, columns = eval\n" +
                         render_percent_table(r.regret.regret, r.regret.source_ids) +
                         "\nP_E matrix (%), rows = train, columns = eval\n" +
                         render_percent_table(r.regret.error_matrix(), r.regret.source_ids);
    write_text_file(dir / "regret_table.txt", tables);

    const auto grid = enumerate_grid();
    std::string summary_csv = "epsilon,greedy,lower,exact,exact_complete,filtered,uncovered,top2_share,mdi_top\n";
    for (std::size_t e = 0; e < r.per_epsilon.size(); ++e) {
        const auto& er = r.per_epsilon[e];
        const auto sub = dir / epsilon_dir(er.epsilon);
        write_text_file(sub / "covering.json", covering_to_json(er.cover.covering, er.cover.bounds));
        write_text_file(sub / "filtered.json", covering_to_json(er.cover.filtered, er.cover.bounds));

        const auto k = er.cover.filtered.size();
        const auto baseline_seed = mix_seed(cfg.seed, 0x62617365ULL + e);
        auto positions = random_baseline(r.regret.size(), k, baseline_seed, cfg.baseline_variants);
        for (auto& subset : positions) {
            for (auto& p : subset) p = r.regret.source_ids[static_cast<std::size_t>(p)];
        }
        write_text_file(sub / "baselines.json", baselines_to_json(positions, k, baseline_seed));
        write_text_file(sub / "clusters.csv", labeling_to_csv(er.clusters));
        write_text_file(sub / "pareto.json", pareto_to_json(er.pareto));
        write_text_file(sub / "profiles.json", profiles_to_json(cluster_profiles(er.clusters, grid)));
        std::string top = "skipped";
        if (er.importance) {
            write_text_file(sub / "mdi.json", importance_to_json(*er.importance));
            top = std::string(parameter_key(er.importance->ranking()[0]));
        }
        const auto& p = er.pareto;
        const double top2 = p.cumulative_shares.size() >= 2 ? p.cumulative_shares[1] : p.cumulative_shares.back();
        summary_csv += format_double(er.epsilon) + "," + std::to_string(er.cover.bounds.greedy_size) + "," +
                       std::to_string(er.cover.bounds.lower_bound) + "," +
                       (er.cover.bounds.exact_size ? std::to_string(*er.cover.bounds.exact_size) : std::string()) + "," +
                       (er.cover.bounds.complete() ? "true" : "false") + "," + std::to_string(er.cover.filtered.size()) +
                       "," + std::to_string(er.cover.filtered.uncovered.size()) + "," + format_double(top2) + "," + top +
                       "\n";
    }
    write_text_file(dir / "summary.txt", summary_table(r));
    write_text_file(dir / "summary.csv", summary_csv);
    std::filesystem::remove(marker);
    return r;
}

std::string cmd_report(const std::filesystem::path& workdir) {
    if (std::filesystem::exists(workdir / "INCOMPLETE")) {
        throw ValidationError(workdir.string() + " holds an incomplete run (" +
                              read_text_file(workdir / "INCOMPLETE") + ")");
    }
    if (!std::filesystem::exists(workdir / "summary.txt")) {
        throw ValidationError(workdir.string() + " does not contain a finished run");
    }
    std::ostringstream out;
    out << "Covering sizes\n" << read_text_file(workdir / "summary.txt") << "\n";
    const auto m = load_regret_matrix(workdir / "regret.csv");
    const auto cfg = load_config(workdir / "config.json");
    for (double eps : cfg.epsilons) {
        const auto sub = workdir / epsilon_dir(eps);
        const auto f = covering_from_json(read_text_file(sub / "covering.json"));
        out << "eps = " << percent(eps, 0) << "%: representatives";
        for (int rep : f.covering.representatives) out << ' ' << rep << " (" << f.covering.assignment.at(rep).size() << ")";
        out << "\n";
        if (std::filesystem::exists(sub / "mdi.json")) {
            const auto imp = importance_from_json(read_text_file(sub / "mdi.json"));
            out << "  MDI:";
            for (auto p : imp.ranking()) out << ' ' << parameter_name(p) << '=' << std::fixed << std::setprecision(3) << imp.of(p);
            out << "\n";
        }
    }
    // Regret among the representatives of the loosest budget.
    const double loosest = *std::max_element(cfg.epsilons.begin(), cfg.epsilons.end());
    const auto f = covering_from_json(read_text_file(workdir / epsilon_dir(loosest) / "covering.json"));
    std::vector<int> reps = f.covering.representatives;
    std::sort(reps.begin(), reps.end());
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(reps.size()), static_cast<Eigen::Index>(reps.size()));
    for (std::size_t a = 0; a < reps.size(); ++a) {
        for (std::size_t b = 0; b < reps.size(); ++b) {
            sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                m.regret(static_cast<Eigen::Index>(m.position(reps[a])), static_cast<Eigen::Index>(m.position(reps[b])));
        }
    }
    out << "\nRegret (%) between the representatives at eps = " << percent(loosest, 0) << "%\n"
        << render_percent_table(sub, reps, 0);
    return out.str();
}

}  // namespace csmcover
