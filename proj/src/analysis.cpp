#include "csmcover/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "csmcover/errors.hpp"
#include "csmcover/util.hpp"

namespace csmcover {

std::string_view assignment_mode_name(AssignmentMode m) {
    return m == AssignmentMode::GreedyOrder ? "greedy-order" : "min-regret";
}

AssignmentMode parse_assignment_mode(std::string_view text) {
    if (text == "greedy-order") return AssignmentMode::GreedyOrder;
    if (text == "min-regret") return AssignmentMode::MinRegret;
    throw ValidationError("unknown assignment mode '" + std::string(text) + "'");
}

ClusterLabeling cluster_sources(const Covering& c, const RegretMatrix& m, AssignmentMode mode) {
    if (!c.uncovered.empty()) throw ValidationError("clustering needs a covering without uncovered sources");
    if (c.representatives.empty()) throw ValidationError("clustering needs at least one representative");
    ClusterLabeling out;
    out.mode = mode;
    if (mode == AssignmentMode::GreedyOrder) {
        for (const auto& [rep, members] : c.assignment) {
            for (int s : members) out.labels[s] = rep;
        }
        for (int s : m.source_ids) {
            if (!out.labels.count(s)) throw ValidationError("source " + std::to_string(s) + " is not in the covering");
        }
    } else {
        std::vector<int> reps = c.representatives;
        std::sort(reps.begin(), reps.end());
        std::vector<std::size_t> rows;
        for (int r : reps) rows.push_back(m.position(r));
        for (std::size_t j = 0; j < m.size(); ++j) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < rows.size(); ++k) {
                if (m.regret(static_cast<Eigen::Index>(rows[k]), static_cast<Eigen::Index>(j)) <
                    m.regret(static_cast<Eigen::Index>(rows[best]), static_cast<Eigen::Index>(j))) {
                    best = k;
                }
            }
            out.labels[m.source_ids[j]] = reps[best];
        }
    }
    for (int rep : c.representatives) out.cluster_sizes[rep] = 0;
    for (const auto& [s, rep] : out.labels) ++out.cluster_sizes[rep];
    return out;
}

std::string labeling_to_csv(const ClusterLabeling& l) {
    std::string out = "source_id,representative_id,mode\n";
    for (const auto& [s, rep] : l.labels) {
        out += std::to_string(s) + "," + std::to_string(rep) + "," + std::string(assignment_mode_name(l.mode)) + "\n";
    }
    return out;
}

ClusterLabeling labeling_from_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"source_id", "representative_id", "mode"}) {
        throw ParseError(origin, 1, "header must be source_id,representative_id,mode");
    }
    ClusterLabeling out;
    bool first = true;
    auto to_int = [&](const std::string& f) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty()) {
            throw ParseError(origin, line_no, "invalid integer '" + f + "'");
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) throw ParseError(origin, line_no, "expected 3 fields");
        AssignmentMode mode{};
        try {
            mode = parse_assignment_mode(fields[2]);
        } catch (const ValidationError&) {
            throw ParseError(origin, line_no, "unknown mode '" + fields[2] + "'");
        }
        if (first) {
            out.mode = mode;
            first = false;
        } else if (mode != out.mode) {
            throw ParseError(origin, line_no, "mixed assignment modes");
        }
        const int s = to_int(fields[0]);
        if (!out.labels.emplace(s, to_int(fields[1])).second) {
            throw ParseError(origin, line_no, "source " + fields[0] + " labeled twice");
        }
    }
    if (out.labels.empty()) throw ParseError(origin, line_no, "no rows");
    for (const auto& [s, rep] : out.labels) ++out.cluster_sizes[rep];
    return out;
}

ParetoReport pareto_report(std::vector<std::size_t> sizes) {
    if (sizes.empty()) throw ValidationError("Pareto report needs at least one cluster");
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    std::size_t total = 0;
    for (auto s : sizes) total += s;
    if (total == 0) throw ValidationError("Pareto report needs a non-empty labeling");
    ParetoReport p;
    std::size_t running = 0;
    for (auto s : sizes) {
        running += s;
        p.cumulative_shares.push_back(static_cast<double>(running) / static_cast<double>(total));
    }
    p.sizes = std::move(sizes);
    return p;
}

ParetoReport pareto_report(const ClusterLabeling& l) {
    std::vector<std::pair<std::size_t, int>> clusters;
    for (const auto& [rep, n] : l.cluster_sizes) clusters.emplace_back(n, rep);
    std::stable_sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::size_t> sizes;
    std::vector<int> reps;
    for (const auto& [n, rep] : clusters) {
        sizes.push_back(n);
        reps.push_back(rep);
    }
    auto p = pareto_report(std::move(sizes));
    p.representatives = std::move(reps);
    return p;
}

std::string pareto_to_json(const ParetoReport& p) {
    nlohmann::ordered_json j;
    j["representatives"] = p.representatives;
    j["sizes"] = p.sizes;
    j["cumulative_shares"] = p.cumulative_shares;
    return j.dump(2) + "\n";
}

std::map<int, LevelHistogram> cluster_profiles(const ClusterLabeling& l, const PipelineDirectory& dir) {
    std::map<int, LevelHistogram> out;
    for (const auto& [s, rep] : l.labels) {
        const auto& d = dir.at(s);
        auto& h = out[rep];
        for (std::size_t k = 0; k < kParameterCount; ++k) ++h[k][static_cast<std::size_t>(d.levels[k])];
    }
    return out;
}

std::string profiles_to_json(const std::map<int, LevelHistogram>& profiles) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [rep, h] : profiles) {
        nlohmann::ordered_json per;
        for (auto p : kAllParameters) {
            const auto& counts = h[static_cast<std::size_t>(p)];
            per[std::string(parameter_key(p))] = std::vector<std::size_t>(counts.begin(), counts.end());
        }
        j[std::to_string(rep)] = std::move(per);
    }
    return j.dump(2) + "\n";
}

}  // namespace csmcover
