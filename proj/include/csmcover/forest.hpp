#ifndef CSMCOVER_FOREST_HPP
#define CSMCOVER_FOREST_HPP

#include <array>
#include <cstdint>
#include <string>

#include "csmcover/analysis.hpp"
#include "csmcover/grid.hpp"

namespace csmcover {

struct ForestConfig {
    int trees = 100;
    /// Parameters examined per split (about sqrt of 5).
    int features_per_split = 2;
    /// 0 grows trees until leaves are pure.
    int max_depth = 0;
    int min_leaf = 1;
    std::uint64_t seed = 0;
};

void validate_forest_config(const ForestConfig& cfg);

/// Mean Decrease Impurity per pipeline parameter, indexed by Parameter,
/// normalized to sum to one.
struct ImportanceReport {
    std::array<double, kParameterCount> mdi{};
    ForestConfig config;

    double of(Parameter p) const { return mdi[static_cast<std::size_t>(p)]; }
    /// Parameters sorted by decreasing importance (stable on ties).
    std::array<Parameter, kParameterCount> ranking() const;
};

/// Fits an entropy-criterion random forest that predicts each source's
/// cluster from its five pipeline levels, and accumulates, for every split,
/// (node sample fraction) x (entropy decrease) on the split parameter.
/// Levels are split with "level <= 0.5" or "level <= 1.5".
ImportanceReport mdi_importance(const ClusterLabeling& labels, const PipelineDirectory& dir,
                                const ForestConfig& cfg = {});

std::string importance_to_json(const ImportanceReport& r);
ImportanceReport importance_from_json(const std::string& text);

}  // namespace csmcover

#endif
