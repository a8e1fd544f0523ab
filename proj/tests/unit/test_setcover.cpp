#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "csmcover/errors.hpp"
#include "csmcover/setcover.hpp"

using namespace csmcover;

TEST_CASE("cover sets on the published 5x5 table at 10%") {
    const auto cs = build_cover_sets(oracle::published_5x5(), 0.10);
    CHECK(cs.members(0) == std::vector<int>{21});
    CHECK(cs.members(1) == std::vector<int>{21, 22, 31});
    CHECK(cs.members(2) == std::vector<int>{22, 31});
    CHECK(cs.members(3) == std::vector<int>{60});
    CHECK(cs.members(4) == std::vector<int>{229});
}

TEST_CASE("cover set extremes") {
    auto m = oracle::published_5x5();
    const auto tight = build_cover_sets(m, 0.0);
    for (std::size_t i = 0; i < tight.size(); ++i) CHECK(tight.sets[i].count() == 1);
    const auto loose = build_cover_sets(m, 0.37);
    for (std::size_t i = 0; i < loose.size(); ++i) CHECK(loose.sets[i].count() == 5);
    CHECK_THROWS_AS(build_cover_sets(m, -0.01), ValidationError);
}

TEST_CASE("greedy covering of the published table") {
    const auto c = greedy_cover(build_cover_sets(oracle::published_5x5(), 0.10));
    CHECK(c.representatives == std::vector<int>{22, 60, 229});
    CHECK(c.assignment.at(22) == std::vector<int>{21, 22, 31});
    CHECK(c.assignment.at(60) == std::vector<int>{60});
    CHECK(c.assignment.at(229) == std::vector<int>{229});
    CHECK(c.residual_order == std::vector<std::size_t>{3, 1, 1});
    CHECK(is_valid_cover(oracle::published_5x5(), 0.10, c.representatives));

    const auto wide = greedy_cover(build_cover_sets(oracle::published_5x5(), 0.40));
    CHECK(wide.representatives == std::vector<int>{21});
}

TEST_CASE("greedy extremes") {
    const auto tight = greedy_cover(build_cover_sets(oracle::published_5x5(), 0.0));
    CHECK(tight.size() == 5);
    const auto universal = cover_sets_from_lists({{0, 1, 2, 3}, {1}, {2}, {3}});
    CHECK(greedy_cover(universal).size() == 1);
}

TEST_CASE("greedy trap: exact beats greedy") {
    // Source 0 covers {0,1,2,3} and is picked first; {4,5} alone cover everything.
    const auto cs = cover_sets_from_lists({{0, 1, 2, 3}, {1}, {2}, {3}, {0, 1, 4}, {2, 3, 5}});
    const auto g = greedy_cover(cs);
    CHECK(g.size() == 3);
    const auto b = exact_cover(cs);
    REQUIRE(b.complete());
    CHECK(*b.exact_size == 2);
    CHECK(*b.exact_size <= b.greedy_size);
    CHECK(b.lower_bound <= *b.exact_size);
    CHECK(b.best_representatives.size() == 2);
}

TEST_CASE("exact solver on the published table matches exhaustive search") {
    const auto cs = build_cover_sets(oracle::published_5x5(), 0.10);
    const auto b = exact_cover(cs);
    REQUIRE(b.complete());
    CHECK(*b.exact_size == 3);
    CHECK(oracle::brute_force_min_cover(cs) == 3);
}

TEST_CASE("exact solver against brute force on random 12-source instances") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        const auto m = oracle::random_regret(12, -0.05, 0.6, rng);
        const auto cs = build_cover_sets(m, 0.15);
        const auto b = exact_cover(cs);
        REQUIRE(b.complete());
        CHECK(*b.exact_size == oracle::brute_force_min_cover(cs));
        CHECK(b.lower_bound <= *b.exact_size);
        CHECK(is_valid_cover(m, 0.15, b.best_representatives));
    }
}

TEST_CASE("exact solver budget and size limit") {
    std::mt19937_64 rng(1);
    const auto m = oracle::random_regret(28, 0.0, 0.6, rng);
    const auto cs = build_cover_sets(m, 0.08);
    const auto b = exact_cover(cs, {.node_budget = 3, .size_limit = 30, .override_limit = false});
    CHECK_FALSE(b.complete());
    CHECK(b.best_size <= b.greedy_size);

    const auto big = oracle::random_regret(31, 0.0, 0.6, rng);
    CHECK_THROWS_AS(exact_cover(build_cover_sets(big, 0.1)), ValidationError);
    CHECK_NOTHROW(exact_cover(build_cover_sets(big, 0.1), {.node_budget = 1000, .size_limit = 30, .override_limit = true}));
}

TEST_CASE("lower bound extremes") {
    const auto singletons = cover_sets_from_lists({{0}, {1}, {2}, {3}});
    CHECK(lower_bound(singletons, greedy_cover(singletons)) == 4);
    const auto universal = cover_sets_from_lists({{0, 1, 2}, {1}, {2}});
    CHECK(lower_bound(universal, greedy_cover(universal)) == 1);
    CHECK(harmonic(1) == 1.0);
    CHECK(harmonic(3) == doctest::Approx(1.0 + 0.5 + 1.0 / 3.0));
}

TEST_CASE("filtering representatives") {
    Covering c;
    c.epsilon = 0.1;
    c.representatives = {229, 60, 5, 7, 9};
    c.residual_order = {159, 69, 8, 4, 3};
    int next = 1000;
    for (std::size_t k = 0; k < 5; ++k) {
        for (std::size_t i = 0; i < c.residual_order[k]; ++i) c.assignment[c.representatives[k]].push_back(next++);
    }
    const auto same = filter_representatives(c, 1);
    CHECK(same.representatives == c.representatives);
    CHECK(same.uncovered.empty());

    const auto rt = filter_representatives(c, 10);
    CHECK(rt.representatives == std::vector<int>{229, 60});
    CHECK(rt.uncovered.size() == 15);
    CHECK(rt.assignment.at(229) == c.assignment.at(229));

    const auto none = filter_representatives(c, 1000);
    CHECK(none.representatives.empty());
    CHECK(none.uncovered.size() == 243);
    CHECK_THROWS_AS(filter_representatives(c, 0), ValidationError);
}

TEST_CASE("random baselines") {
    const auto all = random_baseline(10, 10, 99, 3);
    for (const auto& s : all) CHECK(s == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(random_baseline(243, 5, 1) == random_baseline(243, 5, 1));
    CHECK(random_baseline(243, 5, 1).size() == 3);
    CHECK(random_baseline(243, 5, 1) != random_baseline(243, 5, 2));
    CHECK_THROWS_AS(random_baseline(4, 5, 1), ValidationError);
    CHECK_THROWS_AS(random_baseline(4, 2, 1, 0), ValidationError);
}

TEST_CASE("random baselines are uniform") {
    const std::size_t n = 243, k = 5, draws = 10000;
    const auto subsets = random_baseline(n, k, 12345, draws);
    std::vector<double> counts(n, 0.0);
    for (const auto& s : subsets) {
        CHECK(s.size() == k);
        for (int i : s) counts[static_cast<std::size_t>(i)] += 1.0;
    }
    const double p = static_cast<double>(k) / static_cast<double>(n);
    const double expect = p * draws;
    const double se = std::sqrt(draws * p * (1.0 - p));
    for (std::size_t i = 0; i < n; ++i) {
        CAPTURE(i);
        CHECK(std::abs(counts[i] - expect) <= 3.0 * se);
    }
}

TEST_CASE("covering file round trip") {
    const auto cs = build_cover_sets(oracle::published_5x5(), 0.10);
    const auto c = greedy_cover(cs);
    const auto b = exact_cover(cs);
    const auto text = covering_to_json(c, b);
    const auto f = covering_from_json(text);
    CHECK(f.covering.representatives == c.representatives);
    CHECK(f.covering.assignment == c.assignment);
    CHECK(f.bounds.exact_size == b.exact_size);
    CHECK(covering_to_json(f.covering, f.bounds) == text);
    CHECK_THROWS_AS(covering_from_json("{\"epsilon\": 0.1}"), ValidationError);
}
