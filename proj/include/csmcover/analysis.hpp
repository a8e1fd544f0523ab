#ifndef CSMCOVER_ANALYSIS_HPP
#define CSMCOVER_ANALYSIS_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "csmcover/detector.hpp"
#include "csmcover/grid.hpp"
#include "csmcover/setcover.hpp"

namespace csmcover {

enum class AssignmentMode { GreedyOrder, MinRegret };

std::string_view assignment_mode_name(AssignmentMode m);
AssignmentMode parse_assignment_mode(std::string_view text);

struct ClusterLabeling {
    AssignmentMode mode = AssignmentMode::GreedyOrder;
    /// source id -> representative id
    std::map<int, int> labels;
    /// representative id -> member count
    std::map<int, std::size_t> cluster_sizes;
};

/// Labels every source with a representative of `c`. GreedyOrder copies the
/// covering's disjoint assignment; MinRegret picks argmin_r regret[r][j]
/// (lowest representative id on ties). Requires a covering with no
/// uncovered sources.
ClusterLabeling cluster_sources(const Covering& c, const RegretMatrix& m, AssignmentMode mode);

std::string labeling_to_csv(const ClusterLabeling& l);
ClusterLabeling labeling_from_csv(const std::string& text, const std::string& origin = "<clusters>");

struct ParetoReport {
    /// Descending.
    std::vector<std::size_t> sizes;
    std::vector<double> cumulative_shares;
    /// Representative ids aligned with `sizes`; empty when built from bare sizes.
    std::vector<int> representatives;
};

ParetoReport pareto_report(const ClusterLabeling& l);
ParetoReport pareto_report(std::vector<std::size_t> sizes);
std::string pareto_to_json(const ParetoReport& p);

/// Per-cluster, per-parameter histogram of levels (counts of 0/1/2).
using LevelHistogram = std::array<std::array<std::size_t, kLevelCount>, kParameterCount>;
std::map<int, LevelHistogram> cluster_profiles(const ClusterLabeling& l, const PipelineDirectory& dir);
std::string profiles_to_json(const std::map<int, LevelHistogram>& profiles);

}  // namespace csmcover

#endif
