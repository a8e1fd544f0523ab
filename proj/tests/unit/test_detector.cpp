#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "csmcover/detector.hpp"
#include "csmcover/errors.hpp"
#include "csmcover/simulator.hpp"

using namespace csmcover;

namespace {

Split make_split(const std::vector<std::vector<double>>& rows, const std::vector<Label>& labels) {
    Split s;
    s.features.resize(static_cast<long>(rows.size()), static_cast<long>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) s.features(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    }
    s.labels = labels;
    return s;
}

constexpr auto C = Label::Cover;
constexpr auto S = Label::Stego;

}  // namespace

TEST_CASE("separated 1-D classes are classified perfectly") {
    SourceDataset ds;
    ds.source_id = 3;
    ds.train = make_split({{-1}, {1}, {-1}, {1}}, {C, S, C, S});
    ds.test = ds.train;
    const auto det = train_detector(ds);
    CHECK(det.trained_on == 3);
    CHECK(probability_of_error(det, ds.train) == 0.0);
}

TEST_CASE("2-D hand-computed FLD weights") {
    // Cover mean (1,1), stego mean (4,2); both classes have deviations
    // (-1,-1),(1,1),(0,-1),(0,1), so the pooled covariance is [[.5,.5],[.5,1]].
    const auto split = make_split({{0, 0}, {2, 2}, {1, 0}, {1, 2}, {3, 1}, {5, 3}, {4, 1}, {4, 3}},
                                  {C, C, C, C, S, S, S, S});
    const double lambda = 1e-3;
    const auto det = train_detector(split, 0, lambda);
    // (S + lambda I)^-1 (3,1) with S + lambda I = [[0.501, 0.5], [0.5, 1.001]].
    const double det2 = 0.501 * 1.001 - 0.25;
    const double w0 = (1.001 * 3.0 - 0.5 * 1.0) / det2;
    const double w1 = (-0.5 * 3.0 + 0.501 * 1.0) / det2;
    CHECK(det.weights[0] == doctest::Approx(w0).epsilon(1e-12));
    CHECK(det.weights[1] == doctest::Approx(w1).epsilon(1e-12));
    CHECK(std::abs(det.weights[0] - w0) < 1e-9);
    CHECK(std::abs(det.weights[1] - w1) < 1e-9);
    CHECK(std::abs(det.bias + (w0 * 5.0 + w1 * 3.0) / 2.0) < 1e-9);
}

TEST_CASE("FLD weights satisfy the regularized normal equations") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        Split s;
        const int d = 5, n = 40;
        s.features.resize(n, d);
        for (int i = 0; i < n; ++i) {
            s.labels.push_back(i % 2 ? S : C);
            for (int j = 0; j < d; ++j) s.features(i, j) = n01(rng) + (i % 2 ? 0.5 * j : 0.0);
        }
        const auto det = train_detector(s, 0, 1e-3);
        Eigen::MatrixXd a = pooled_covariance(s);
        a.diagonal().array() += 1e-3;
        Eigen::VectorXd mc = Eigen::VectorXd::Zero(d), ms = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < n; ++i) (i % 2 ? ms : mc) += s.features.row(i).transpose();
        const Eigen::VectorXd delta = (ms - mc) / (n / 2.0);
        CHECK((a * det.weights - delta).norm() / delta.norm() < 1e-8);
    }
}

TEST_CASE("training errors") {
    CHECK_THROWS_AS(train_detector(make_split({{1}, {2}}, {C, C}), 0), ValidationError);
    SourceDataset ds;
    ds.train = make_split({{1}, {2}}, {C, S});
    CHECK_THROWS_AS(train_detector(ds), ValidationError);  // empty test split
    CHECK_THROWS_AS(train_detector(ds.train, 0, 0.0), ValidationError);
    ds.test = make_split({{1}, {2}, {3}}, {C, C, C});
    CHECK_THROWS_AS(validate_dataset(ds), ValidationError);  // unbalanced
}

TEST_CASE("probability of error on hand-counted fixtures") {
    SUBCASE("always-cover detector on a balanced set") {
        LinearDetector det{Eigen::VectorXd::Zero(1), -1.0, 0};
        CHECK(probability_of_error(det, make_split({{1}, {2}, {3}, {4}}, {C, S, C, S})) == 0.5);
    }
    SUBCASE("three misclassifications out of ten") {
        LinearDetector det{Eigen::VectorXd::Ones(1), 0.0, 0};
        // cover 0.5 -> stego (wrong); stegos -0.2 and -1 -> cover (wrong).
        const auto s = make_split({{-2}, {-1}, {-0.5}, {-0.1}, {0.5}, {2}, {1}, {0.3}, {-0.2}, {-1}},
                                  {C, C, C, C, C, S, S, S, S, S});
        CHECK(misclassified(det, s) == 3);
        CHECK(probability_of_error(det, s) == 0.3);
    }
    SUBCASE("empty test set") {
        LinearDetector det{Eigen::VectorXd::Ones(1), 0.0, 0};
        CHECK_THROWS_AS(probability_of_error(det, Split{}), ValidationError);
    }
}

TEST_CASE("labels unrelated to features give chance-level error") {
    SimulatorConfig cfg;
    cfg.dimension = 8;
    cfg.samples_per_class = 4000;
    cfg.seed = 11;
    auto ds = simulate_source(PipelineDescriptor::from_index(100), cfg);
    std::mt19937_64 rng(5);
    std::shuffle(ds.train.labels.begin(), ds.train.labels.end(), rng);
    std::shuffle(ds.test.labels.begin(), ds.test.labels.end(), rng);
    const auto det = train_detector(ds);
    CHECK(std::abs(probability_of_error(det, ds.test) - 0.5) < 0.05);
}

TEST_CASE("regret matrix structure and independent recomputation") {
    SimulatorConfig cfg;
    cfg.dimension = 6;
    cfg.samples_per_class = 300;
    cfg.seed = 42;
    const auto sources = simulate_sources({4, 60, 229}, cfg);
    const auto m = regret_matrix(sources, 1e-3);
    REQUIRE(m.size() == 3);
    for (long i = 0; i < 3; ++i) CHECK(m.regret(i, i) == 0.0);
    validate_regret_matrix(m);

    std::vector<oracle::NaiveDetector> dets;
    for (const auto& s : sources) dets.push_back(oracle::train(s.train, 1e-3));
    for (std::size_t t = 0; t < 3; ++t) {
        const double n = static_cast<double>(sources[t].test.size());
        const double intrinsic = oracle::count_errors(dets[t], sources[t].test) / n;
        CHECK(std::abs(m.intrinsic[t] - intrinsic) < 1e-12);
        for (std::size_t s = 0; s < 3; ++s) {
            const double expect = oracle::count_errors(dets[s], sources[t].test) / n - intrinsic;
            CHECK(std::abs(m.regret(static_cast<long>(s), static_cast<long>(t)) - expect) < 1e-12);
            const double pe = m.intrinsic[t] + m.regret(static_cast<long>(s), static_cast<long>(t));
            CHECK(pe >= 0.0);
            CHECK(pe <= 1.0);
        }
    }
}

TEST_CASE("regret matrix errors") {
    SimulatorConfig a;
    a.dimension = 4;
    SimulatorConfig b = a;
    b.dimension = 5;
    std::vector<SourceDataset> mixed{simulate_source(PipelineDescriptor::from_index(1), a),
                                     simulate_source(PipelineDescriptor::from_index(2), b)};
    try {
        regret_matrix(mixed);
        FAIL("expected dimension error");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("source 2") != std::string::npos);
        CHECK(what.find("source 1") != std::string::npos);
    }
    CHECK_THROWS_AS(regret_matrix(std::vector<SourceDataset>{mixed[0]}), ValidationError);
}

TEST_CASE("percent table layout") {
    Eigen::MatrixXd pe(2, 2);
    pe << 0.05, 0.77, 0.48, 0.0018;
    const auto table = render_percent_table(pe, {5, 167}, 2);
    CHECK(table.find("Train / Eval") != std::string::npos);
    CHECK(table.find("77.00") != std::string::npos);
    CHECK(table.find("0.18") != std::string::npos);
    // Rows are training sources.
    CHECK(table.find("|            5 |  5.00 | 77.00 |") != std::string::npos);
}
