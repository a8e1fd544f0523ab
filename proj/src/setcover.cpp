#include "csmcover/setcover.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "csmcover/errors.hpp"
#include "csmcover/util.hpp"

namespace csmcover {

std::vector<int> CoverSets::members(std::size_t i) const {
    std::vector<int> out;
    for (auto j = sets[i].find_first(); j != SourceSet::npos; j = sets[i].find_next(j)) {
        out.push_back(source_ids[j]);
    }
    return out;
}

std::size_t CoverSets::largest_set() const {
    std::size_t best = 0;
    for (const auto& s : sets) best = std::max(best, s.count());
    return best;
}

CoverSets build_cover_sets(const RegretMatrix& m, double epsilon) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be >= 0");
    validate_regret_matrix(m);
    const auto n = m.size();
    CoverSets cs;
    cs.epsilon = epsilon;
    cs.source_ids = m.source_ids;
    cs.sets.assign(n, SourceSet(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (m.regret(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= epsilon) cs.sets[i].set(j);
        }
    }
    return cs;
}

CoverSets cover_sets_from_lists(const std::vector<std::vector<std::size_t>>& lists, double epsilon) {
    const auto n = lists.size();
    CoverSets cs;
    cs.epsilon = epsilon;
    cs.source_ids.resize(n);
    std::iota(cs.source_ids.begin(), cs.source_ids.end(), 0);
    cs.sets.assign(n, SourceSet(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : lists[i]) {
            if (j >= n) throw ValidationError("cover set member out of range");
            cs.sets[i].set(j);
        }
        if (!cs.sets[i].test(i)) throw ValidationError("cover set " + std::to_string(i) + " must contain itself");
    }
    return cs;
}

std::vector<int> Covering::all_sources() const {
    std::vector<int> out(uncovered);
    for (const auto& [rep, members] : assignment) out.insert(out.end(), members.begin(), members.end());
    std::sort(out.begin(), out.end());
    return out;
}

Covering greedy_cover(const CoverSets& cs) {
    const auto n = cs.size();
    Covering out;
    out.epsilon = cs.epsilon;
    SourceSet uncovered(n);
    uncovered.set();
    std::vector<SourceSet> residual = cs.sets;

    while (uncovered.any()) {
        std::size_t best = n;
        std::size_t best_count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = residual[i].count();
            if (c == 0) continue;
            if (c > best_count || (c == best_count && cs.source_ids[i] < cs.source_ids[best])) {
                best = i;
                best_count = c;
            }
        }
        if (best == n) throw RuntimeError("greedy covering stalled: some source belongs to no cover set");

        const SourceSet picked = residual[best];
        const int rep = cs.source_ids[best];
        out.representatives.push_back(rep);
        out.residual_order.push_back(best_count);
        auto& members = out.assignment[rep];
        for (auto j = picked.find_first(); j != SourceSet::npos; j = picked.find_next(j)) {
            members.push_back(cs.source_ids[j]);
        }
        std::sort(members.begin(), members.end());
        uncovered -= picked;
        for (auto& r : residual) r -= picked;
    }
    return out;
}

std::vector<int> uncovered_sources(const RegretMatrix& m, double epsilon, std::span<const int> representatives) {
    std::vector<std::size_t> rows;
    for (int r : representatives) rows.push_back(m.position(r));
    std::vector<int> out;
    for (std::size_t j = 0; j < m.size(); ++j) {
        const bool covered = std::any_of(rows.begin(), rows.end(), [&](std::size_t r) {
            return m.regret(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) <= epsilon;
        });
        if (!covered) out.push_back(m.source_ids[j]);
    }
    return out;
}

bool is_valid_cover(const RegretMatrix& m, double epsilon, std::span<const int> representatives) {
    return uncovered_sources(m, epsilon, representatives).empty();
}

double harmonic(std::size_t d) {
    double h = 0.0;
    for (std::size_t k = 1; k <= d; ++k) h += 1.0 / static_cast<double>(k);
    return h;
}

std::size_t lower_bound(const CoverSets& cs, const Covering& greedy) {
    const auto n = cs.size();
    if (n == 0) return 0;
    const double h = harmonic(cs.largest_set());
    const auto ratio_bound =
        static_cast<std::size_t>(std::ceil(static_cast<double>(greedy.size()) / h - 1e-9));

    // Two sources are co-coverable when some cover set holds both of them.
    std::vector<SourceSet> cocover(n, SourceSet(n));
    std::vector<std::size_t> containing(n, 0);
    for (const auto& s : cs.sets) {
        for (auto j = s.find_first(); j != SourceSet::npos; j = s.find_next(j)) {
            cocover[j] |= s;
            ++containing[j];
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return containing[a] < containing[b]; });
    SourceSet blocked(n);
    std::size_t independent = 0;
    for (auto j : order) {
        if (blocked.test(j)) continue;
        ++independent;
        blocked |= cocover[j];
    }
    return std::max(ratio_bound, independent);
}

CoveringBounds greedy_bounds(const CoverSets& cs, const Covering& greedy) {
    CoveringBounds b;
    b.greedy_size = greedy.size();
    b.lower_bound = lower_bound(cs, greedy);
    b.best_size = greedy.size();
    b.best_representatives = greedy.representatives;
    if (b.lower_bound == b.greedy_size) b.exact_size = b.greedy_size;
    return b;
}

namespace {

class BranchAndBound {
public:
    BranchAndBound(const CoverSets& cs, std::uint64_t budget, std::size_t incumbent_size,
                   std::vector<std::size_t> incumbent)
        : cs_(cs), n_(cs.size()), budget_(budget), best_size_(incumbent_size), best_(std::move(incumbent)),
          holders_(n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (auto j = cs.sets[i].find_first(); j != SourceSet::npos; j = cs.sets[i].find_next(j)) {
                holders_[j].push_back(i);
            }
        }
    }

    bool run() {
        SourceSet uncovered(n_);
        uncovered.set();
        std::vector<std::size_t> chosen;
        search(uncovered, chosen);
        return !exhausted_;
    }

    std::size_t best_size() const { return best_size_; }
    const std::vector<std::size_t>& best() const { return best_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    void search(const SourceSet& uncovered, std::vector<std::size_t>& chosen) {
        if (exhausted_) return;
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return;
        }
        const auto remaining = uncovered.count();
        if (remaining == 0) {
            if (chosen.size() < best_size_) {
                best_size_ = chosen.size();
                best_ = chosen;
            }
            return;
        }
        std::size_t widest = 0;
        for (const auto& s : cs_.sets) widest = std::max(widest, (s & uncovered).count());
        const auto needed = (remaining + widest - 1) / widest;
        if (chosen.size() + needed >= best_size_) return;

        // Branch on the uncovered source with the fewest candidate sets.
        std::size_t pivot = n_;
        for (auto j = uncovered.find_first(); j != SourceSet::npos; j = uncovered.find_next(j)) {
            if (pivot == n_ || holders_[j].size() < holders_[pivot].size()) pivot = j;
        }
        std::vector<std::pair<std::size_t, std::size_t>> options;
        for (auto i : holders_[pivot]) options.emplace_back((cs_.sets[i] & uncovered).count(), i);
        std::sort(options.begin(), options.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (const auto& [gain, i] : options) {
            chosen.push_back(i);
            search(uncovered - cs_.sets[i], chosen);
            chosen.pop_back();
            if (exhausted_) return;
        }
    }

    const CoverSets& cs_;
    std::size_t n_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
    std::size_t best_size_;
    std::vector<std::size_t> best_;
    std::vector<std::vector<std::size_t>> holders_;
};

}  // namespace

CoveringBounds exact_cover(const CoverSets& cs, const ExactOptions& options) {
    if (cs.size() > options.size_limit && !options.override_limit) {
        throw ValidationError("exact covering is limited to " + std::to_string(options.size_limit) +
                              " sources (got " + std::to_string(cs.size()) + "); pass an explicit override");
    }
    const auto greedy = greedy_cover(cs);
    CoveringBounds b = greedy_bounds(cs, greedy);
    b.exact_size.reset();

    std::vector<std::size_t> incumbent;
    for (int r : greedy.representatives) {
        incumbent.push_back(static_cast<std::size_t>(
            std::find(cs.source_ids.begin(), cs.source_ids.end(), r) - cs.source_ids.begin()));
    }
    BranchAndBound bnb(cs, options.node_budget, greedy.size(), incumbent);
    const bool complete = bnb.run();
    b.nodes = bnb.nodes();
    b.best_size = bnb.best_size();
    b.best_representatives.clear();
    for (auto i : bnb.best()) b.best_representatives.push_back(cs.source_ids[i]);
    if (complete) b.exact_size = b.best_size;
    return b;
}

Covering filter_representatives(const Covering& c, std::size_t min_cover) {
    if (min_cover < 1) throw ValidationError("min_cover must be at least 1");
    Covering out;
    out.epsilon = c.epsilon;
    out.uncovered = c.uncovered;
    for (std::size_t k = 0; k < c.representatives.size(); ++k) {
        const int rep = c.representatives[k];
        const auto& members = c.assignment.at(rep);
        if (members.size() >= min_cover) {
            out.representatives.push_back(rep);
            out.assignment[rep] = members;
            out.residual_order.push_back(k < c.residual_order.size() ? c.residual_order[k] : members.size());
        } else {
            out.uncovered.insert(out.uncovered.end(), members.begin(), members.end());
        }
    }
    std::sort(out.uncovered.begin(), out.uncovered.end());
    return out;
}

std::vector<std::vector<int>> random_baseline(std::size_t n, std::size_t k, std::uint64_t seed, std::size_t variants) {
    if (k > n) throw ValidationError("baseline size " + std::to_string(k) + " exceeds population " + std::to_string(n));
    if (variants < 1) throw ValidationError("at least one baseline variant is required");
    std::vector<std::vector<int>> out;
    for (std::size_t v = 0; v < variants; ++v) {
        std::mt19937_64 rng(mix_seed(seed, v));
        std::vector<int> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        std::vector<int> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(subset.begin(), subset.end());
        out.push_back(std::move(subset));
    }
    return out;
}

std::string covering_to_json(const Covering& c, const CoveringBounds& bounds) {
    nlohmann::ordered_json j;
    j["epsilon"] = c.epsilon;
    j["representatives"] = c.representatives;
    nlohmann::ordered_json assignment = nlohmann::ordered_json::object();
    for (int rep : c.representatives) assignment[std::to_string(rep)] = c.assignment.at(rep);
    j["assignment"] = std::move(assignment);
    j["uncovered"] = c.uncovered;
    nlohmann::ordered_json b;
    b["greedy"] = bounds.greedy_size;
    b["lower"] = bounds.lower_bound;
    b["exact"] = bounds.exact_size ? nlohmann::ordered_json(*bounds.exact_size) : nlohmann::ordered_json(nullptr);
    b["exact_complete"] = bounds.complete();
    j["bounds"] = std::move(b);
    return j.dump(2) + "\n";
}

CoveringFile covering_from_json(const std::string& text) {
    CoveringFile f;
    try {
        const auto j = nlohmann::json::parse(text);
        f.covering.epsilon = j.at("epsilon").get<double>();
        f.covering.representatives = j.at("representatives").get<std::vector<int>>();
        for (int rep : f.covering.representatives) {
            auto members = j.at("assignment").at(std::to_string(rep)).get<std::vector<int>>();
            f.covering.residual_order.push_back(members.size());
            f.covering.assignment[rep] = std::move(members);
        }
        if (j.at("assignment").size() != f.covering.representatives.size()) {
            throw ValidationError("covering assignment keys do not match representatives");
        }
        f.covering.uncovered = j.at("uncovered").get<std::vector<int>>();
        const auto& b = j.at("bounds");
        f.bounds.greedy_size = b.at("greedy").get<std::size_t>();
        f.bounds.lower_bound = b.at("lower").get<std::size_t>();
        if (!b.at("exact").is_null()) f.bounds.exact_size = b.at("exact").get<std::size_t>();
        if (b.at("exact_complete").get<bool>() != f.bounds.exact_size.has_value()) {
            throw ValidationError("covering bounds: exact_complete disagrees with exact");
        }
        f.bounds.best_size = f.bounds.exact_size.value_or(f.bounds.greedy_size);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed covering file: ") + e.what());
    }
    std::set<int> seen;
    for (int s : f.covering.all_sources()) {
        if (!seen.insert(s).second) throw ValidationError("source " + std::to_string(s) + " appears twice in covering");
    }
    return f;
}

}  // namespace csmcover
