#include "csmcover/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "csmcover/errors.hpp"
#include "csmcover/util.hpp"

namespace csmcover {

void validate_forest_config(const ForestConfig& cfg) {
    if (cfg.trees < 1) throw ValidationError("forest needs at least one tree");
    if (cfg.features_per_split < 1 || cfg.features_per_split > static_cast<int>(kParameterCount)) {
        throw ValidationError("features_per_split must be in 1..5");
    }
    if (cfg.max_depth < 0) throw ValidationError("max_depth must be >= 0");
    if (cfg.min_leaf < 1) throw ValidationError("min_leaf must be >= 1");
}

std::array<Parameter, kParameterCount> ImportanceReport::ranking() const {
    auto order = kAllParameters;
    std::stable_sort(order.begin(), order.end(), [&](Parameter a, Parameter b) { return of(a) > of(b); });
    return order;
}

namespace {

constexpr std::array<double, 2> kThresholds{0.5, 1.5};

// Summing over sorted counts keeps the value independent of class numbering.
double entropy(std::vector<std::size_t> counts, std::size_t total) {
    std::sort(counts.begin(), counts.end());
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<Levels>& x, const std::vector<std::size_t>& y, std::size_t classes,
                const ForestConfig& cfg, std::uint64_t seed, std::array<double, kParameterCount>& importance)
        : x_(x), y_(y), classes_(classes), cfg_(cfg), rng_(seed), importance_(importance) {}

    void grow() {
        const auto n = x_.size();
        std::uniform_int_distribution<std::size_t> draw(0, n - 1);
        std::vector<std::size_t> sample(n);
        for (auto& s : sample) s = draw(rng_);
        total_ = static_cast<double>(n);
        split(sample, 0);
    }

private:
    std::vector<std::size_t> counts(const std::vector<std::size_t>& sample) const {
        std::vector<std::size_t> c(classes_, 0);
        for (auto s : sample) ++c[y_[s]];
        return c;
    }

    void split(const std::vector<std::size_t>& sample, int depth) {
        const auto n = sample.size();
        const double h = entropy(counts(sample), n);
        if (h <= 0.0) return;
        if (cfg_.max_depth > 0 && depth >= cfg_.max_depth) return;
        if (n < 2 * static_cast<std::size_t>(cfg_.min_leaf)) return;

        std::array<std::size_t, kParameterCount> order{};
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng_);

        int examined = 0;
        double best_gain = -1.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        for (auto f : order) {
            if (examined >= cfg_.features_per_split) break;
            const bool constant = std::all_of(sample.begin(), sample.end(),
                                              [&](std::size_t s) { return x_[s][f] == x_[sample.front()][f]; });
            if (constant) continue;
            ++examined;
            for (double t : kThresholds) {
                std::vector<std::size_t> left(classes_, 0), right(classes_, 0);
                std::size_t nl = 0;
                for (auto s : sample) {
                    if (x_[s][f] <= t) {
                        ++left[y_[s]];
                        ++nl;
                    } else {
                        ++right[y_[s]];
                    }
                }
                const auto nr = n - nl;
                if (nl < static_cast<std::size_t>(cfg_.min_leaf) || nr < static_cast<std::size_t>(cfg_.min_leaf)) continue;
                const double gain = h - (static_cast<double>(nl) / n) * entropy(left, nl) -
                                    (static_cast<double>(nr) / n) * entropy(right, nr);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = t;
                }
            }
        }
        if (best_gain < 0.0) return;

        importance_[best_feature] += (static_cast<double>(n) / total_) * std::max(best_gain, 0.0);
        std::vector<std::size_t> left, right;
        for (auto s : sample) (x_[s][best_feature] <= best_threshold ? left : right).push_back(s);
        split(left, depth + 1);
        split(right, depth + 1);
    }

    const std::vector<Levels>& x_;
    const std::vector<std::size_t>& y_;
    std::size_t classes_;
    const ForestConfig& cfg_;
    std::mt19937_64 rng_;
    std::array<double, kParameterCount>& importance_;
    double total_ = 1.0;
};

}  // namespace

ImportanceReport mdi_importance(const ClusterLabeling& labels, const PipelineDirectory& dir, const ForestConfig& cfg) {
    validate_forest_config(cfg);
    std::set<int> distinct;
    for (const auto& [s, rep] : labels.labels) distinct.insert(rep);
    if (distinct.size() < 2) {
        throw ValidationError("importance analysis needs at least two distinct cluster labels");
    }
    const std::vector<int> classes(distinct.begin(), distinct.end());

    std::vector<Levels> x;
    std::vector<std::size_t> y;
    for (const auto& [s, rep] : labels.labels) {
        x.push_back(dir.at(s).levels);
        y.push_back(static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), rep) - classes.begin()));
    }

    ImportanceReport report;
    report.config = cfg;
    std::array<double, kParameterCount> raw{};
    for (int t = 0; t < cfg.trees; ++t) {
        TreeBuilder tree(x, y, classes.size(), cfg, mix_seed(cfg.seed, static_cast<std::uint64_t>(t)), raw);
        tree.grow();
    }
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    if (!(total > 0.0)) throw RuntimeError("forest made no informative split; importance is undefined");
    for (std::size_t k = 0; k < kParameterCount; ++k) report.mdi[k] = raw[k] / total;
    return report;
}

std::string importance_to_json(const ImportanceReport& r) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json mdi;
    for (auto p : kAllParameters) mdi[std::string(parameter_key(p))] = r.of(p);
    j["mdi"] = std::move(mdi);
    nlohmann::ordered_json config;
    config["trees"] = r.config.trees;
    config["criterion"] = "entropy";
    config["features_per_split"] = r.config.features_per_split;
    config["max_depth"] = r.config.max_depth;
    config["min_leaf"] = r.config.min_leaf;
    config["bootstrap"] = true;
    j["config"] = std::move(config);
    j["seed"] = r.config.seed;
    return j.dump(2) + "\n";
}

ImportanceReport importance_from_json(const std::string& text) {
    ImportanceReport r;
    try {
        const auto j = nlohmann::json::parse(text);
        for (auto p : kAllParameters) r.mdi[static_cast<std::size_t>(p)] = j.at("mdi").at(std::string(parameter_key(p))).get<double>();
        const auto& c = j.at("config");
        r.config.trees = c.at("trees").get<int>();
        r.config.features_per_split = c.at("features_per_split").get<int>();
        r.config.max_depth = c.at("max_depth").get<int>();
        r.config.min_leaf = c.at("min_leaf").get<int>();
        r.config.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed importance report: ") + e.what());
    }
    return r;
}

}  // namespace csmcover
