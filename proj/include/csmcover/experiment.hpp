#ifndef CSMCOVER_EXPERIMENT_HPP
#define CSMCOVER_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csmcover/analysis.hpp"
#include "csmcover/detector.hpp"
#include "csmcover/forest.hpp"
#include "csmcover/grid.hpp"
#include "csmcover/setcover.hpp"
#include "csmcover/simulator.hpp"

namespace csmcover {

struct ExperimentConfig {
    std::filesystem::path workdir = "csmcover-run";
    /// Optional feature file/directory; when empty the simulator provides sources.
    std::filesystem::path features;
    SimulatorConfig simulator;
    double ridge = kDefaultRidge;
    std::vector<double> epsilons{0.02, 0.04, 0.06, 0.08, 0.10};
    std::size_t min_cover = 10;
    std::size_t baseline_variants = 3;
    std::uint64_t seed = 0;
    /// Sub-grid restriction, e.g. {"demosaicking=0", "sharpen_micro=0"}.
    std::vector<std::string> pins;
    ForestConfig forest;
    ExactOptions exact;
    AssignmentMode assignment = AssignmentMode::GreedyOrder;
    /// Required for very large runs (full grid at high sample counts).
    bool allow_full = false;
};

void validate_experiment(const ExperimentConfig& cfg);
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Stable fingerprint of the configuration.
std::string config_hash(const ExperimentConfig& cfg);

/// Estimated multiply-adds of the regret evaluation; above the threshold a
/// run needs allow_full.
double estimated_work(std::size_t sources, const SimulatorConfig& sim);
inline constexpr double kFullRunWorkThreshold = 2e9;

/// Raised when an output already exists and overwriting was not requested.
void ensure_writable(const std::filesystem::path& path, bool force);

void cmd_grid(const std::filesystem::path& out, bool force);

std::vector<int> selected_sources(const ExperimentConfig& cfg);
void cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out, bool force);

RegretMatrix cmd_regret(const std::filesystem::path& features, const std::filesystem::path& out, double ridge,
                        const nlohmann::ordered_json& provenance, bool force);

struct CoverResult {
    Covering covering;
    Covering filtered;
    CoveringBounds bounds;
};

/// Greedy covering with bounds (exact search when the instance is small
/// enough) and optional filtering.
CoverResult cover_matrix(const RegretMatrix& m, double epsilon, std::optional<std::size_t> min_cover,
                         const ExactOptions& exact);

std::string baselines_to_json(const std::vector<std::vector<int>>& subsets, std::size_t k, std::uint64_t seed);

struct EpsilonResult {
    double epsilon = 0.0;
    CoverResult cover;
    ClusterLabeling clusters;
    ParetoReport pareto;
    std::optional<ImportanceReport> importance;
};

struct RunResult {
    RegretMatrix regret;
    std::vector<EpsilonResult> per_epsilon;
};

/// In-memory pipeline: sources, regret matrix, and per-epsilon analysis.
RunResult run_pipeline(const ExperimentConfig& cfg);

/// run_pipeline plus every output file under cfg.workdir. While running, a
/// file named INCOMPLETE names the current stage; it is removed on success.
RunResult cmd_run(const ExperimentConfig& cfg, bool force);

/// Covering-size table in percent form.
std::string summary_table(const RunResult& r);

/// Textual report assembled from a finished run directory.
std::string cmd_report(const std::filesystem::path& workdir);

}  // namespace csmcover

#endif
