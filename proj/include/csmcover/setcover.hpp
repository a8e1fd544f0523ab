#ifndef CSMCOVER_SETCOVER_HPP
#define CSMCOVER_SETCOVER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "csmcover/detector.hpp"

namespace csmcover {

using SourceSet = boost::dynamic_bitset<>;

/// sets[i] holds the positions j with regret[i][j] <= epsilon, i.e. the
/// sources a detector trained on source i handles within the regret budget.
struct CoverSets {
    double epsilon = 0.0;
    std::vector<int> source_ids;
    std::vector<SourceSet> sets;

    std::size_t size() const { return source_ids.size(); }
    /// Source ids in set i, ascending by position.
    std::vector<int> members(std::size_t i) const;
    std::size_t largest_set() const;
};

CoverSets build_cover_sets(const RegretMatrix& m, double epsilon);

/// Builds cover sets directly from membership lists (positions). Used for
/// hand-made instances; every set must contain its own position.
CoverSets cover_sets_from_lists(const std::vector<std::vector<std::size_t>>& lists, double epsilon = 0.0);

struct Covering {
    double epsilon = 0.0;
    /// Greedy pick order.
    std::vector<int> representatives;
    /// Representative -> sources it was credited with at pick time. Disjoint.
    std::map<int, std::vector<int>> assignment;
    /// Number of newly covered sources at each pick, aligned with representatives.
    std::vector<std::size_t> residual_order;
    /// Sources no kept representative covers (only non-empty after filtering).
    std::vector<int> uncovered;

    std::size_t size() const { return representatives.size(); }
    std::vector<int> all_sources() const;
};

/// Greedy set covering. Repeatedly picks the source whose residual set (not
/// yet covered sources) is largest, lowest source id on ties, until every
/// source is covered.
Covering greedy_cover(const CoverSets& cs);

/// Sources of `m` not within `epsilon` regret of any representative.
std::vector<int> uncovered_sources(const RegretMatrix& m, double epsilon, std::span<const int> representatives);

/// Cover validity: every source has a representative r with regret[r][j] <= epsilon.
bool is_valid_cover(const RegretMatrix& m, double epsilon, std::span<const int> representatives);

struct CoveringBounds {
    std::size_t greedy_size = 0;
    std::size_t lower_bound = 0;
    /// Present only when the exact search finished within its node budget.
    std::optional<std::size_t> exact_size;
    /// Smallest covering found; equals exact_size when complete.
    std::size_t best_size = 0;
    std::vector<int> best_representatives;
    std::uint64_t nodes = 0;

    bool complete() const { return exact_size.has_value(); }
};

struct ExactOptions {
    std::uint64_t node_budget = 5'000'000;
    std::size_t size_limit = 30;
    /// Allows instances larger than size_limit.
    bool override_limit = false;
};

/// Branch-and-bound minimum set cover seeded with the greedy covering as
/// incumbent. Returns an incomplete result when the node budget runs out.
CoveringBounds exact_cover(const CoverSets& cs, const ExactOptions& options = {});

/// Bounds without running the exact search.
CoveringBounds greedy_bounds(const CoverSets& cs, const Covering& greedy);

/// Harmonic number H_d.
double harmonic(std::size_t d);

/// max(ceil(|greedy| / H_d), size of a greedily grown set of sources no two
/// of which share a cover set).
std::size_t lower_bound(const CoverSets& cs, const Covering& greedy);

/// Drops representatives credited with fewer than `min_cover` sources; their
/// sources move to `uncovered`.
Covering filter_representatives(const Covering& c, std::size_t min_cover);

/// `variants` independent uniform k-subsets of positions 0..n-1, each sorted.
std::vector<std::vector<int>> random_baseline(std::size_t n, std::size_t k, std::uint64_t seed,
                                              std::size_t variants = 3);

std::string covering_to_json(const Covering& c, const CoveringBounds& bounds);

struct CoveringFile {
    Covering covering;
    CoveringBounds bounds;
};
CoveringFile covering_from_json(const std::string& text);

}  // namespace csmcover

#endif
