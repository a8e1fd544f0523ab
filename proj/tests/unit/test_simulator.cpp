#include <doctest.h>

#include "csmcover/errors.hpp"
#include "csmcover/simulator.hpp"

using namespace csmcover;

namespace {

SimulatorConfig small_config() {
    SimulatorConfig cfg;
    cfg.dimension = 8;
    cfg.samples_per_class = 200;
    cfg.seed = 3;
    return cfg;
}

double mean_abs_regret_between(int a, int b, const SimulatorConfig& base, int runs) {
    double total = 0.0;
    for (int r = 0; r < runs; ++r) {
        auto cfg = base;
        cfg.seed = 1000 + static_cast<std::uint64_t>(r);
        const auto m = regret_matrix(simulate_sources({a, b}, cfg));
        total += std::abs(m.regret(0, 1)) + std::abs(m.regret(1, 0));
    }
    return total / (2.0 * runs);
}

}  // namespace

TEST_CASE("simulation is deterministic") {
    const auto cfg = small_config();
    const auto d = PipelineDescriptor::from_index(77);
    const auto a = simulate_source(d, cfg);
    const auto b = simulate_source(d, cfg);
    CHECK(a.train.features == b.train.features);
    CHECK(a.test.features == b.test.features);
    CHECK(a.train.labels == b.train.labels);
    auto other = cfg;
    other.seed = 4;
    CHECK(simulate_source(d, other).train.features != a.train.features);
}

TEST_CASE("splits are balanced halves") {
    auto cfg = small_config();
    cfg.samples_per_class = 7;
    const auto ds = simulate_source(PipelineDescriptor::from_index(0), cfg);
    CHECK(ds.train.count(Label::Cover) == 3);
    CHECK(ds.train.count(Label::Stego) == 3);
    CHECK(ds.test.count(Label::Cover) == 4);
    CHECK(ds.test.count(Label::Stego) == 4);
    validate_dataset(ds);
}

TEST_CASE("zero payload shift leaves the detector at chance") {
    auto cfg = small_config();
    cfg.payload_shift = 0.0;
    const auto ds = simulate_source(PipelineDescriptor::from_index(50), cfg);
    CHECK(probability_of_error(train_detector(ds), ds.test) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("config validation") {
    auto cfg = small_config();
    cfg.payload_shift = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), ValidationError);
    cfg = small_config();
    cfg.base_noise = 0.0;
    CHECK_THROWS_AS(validate_config(cfg), ValidationError);
    cfg = small_config();
    cfg.sensitivity_of(Parameter::Downsampling) = -0.1;
    CHECK_THROWS_AS(validate_config(cfg), ValidationError);
}

TEST_CASE("noise scale formula") {
    auto cfg = small_config();
    cfg.dimension = 3;
    cfg.base_noise = 0.5;
    cfg.sensitivity = {0.2, 1.5, 0.1, 0.5, 0.8};
    const auto s = noise_scales(PipelineDescriptor::from_levels({2, 0, 1, 2, 1}), cfg);
    const double common = 0.5 * (1 + 1.5 * 2) * (1 + 0.1 * 1) * (1 + 0.8 * 1) * (1 + 0.5 * 2);
    CHECK(s[0] == doctest::Approx(common));                 // modulation 0
    CHECK(s[1] == doctest::Approx(common * (1 + 0.2 * 0.5)));  // modulation 0.5, level 2
    CHECK(s[2] == doctest::Approx(common * (1 + 0.2 * 1.0)));
}

TEST_CASE("a parameter with zero sensitivity creates no mismatch") {
    auto cfg = small_config();
    cfg.sensitivity = {0.0, 2.0, 0.0, 0.0, 0.0};
    const int a = encode({0, 1, 0, 0, 0});
    const int b = encode({2, 1, 0, 0, 0});
    CHECK(noise_scales(PipelineDescriptor::from_index(a), cfg) == noise_scales(PipelineDescriptor::from_index(b), cfg));
    CHECK(mean_abs_regret_between(a, b, cfg, 10) < 0.02);
}

TEST_CASE("mismatch grows with the level gap of the only sensitive parameter") {
    auto cfg = small_config();
    for (auto p : {Parameter::Denoising, Parameter::PostResizeSharpening, Parameter::Downsampling}) {
        CAPTURE(parameter_name(p));
        cfg.sensitivity = {0, 0, 0, 0, 0};
        cfg.sensitivity_of(p) = 1.0;
        Levels base{1, 1, 1, 1, 1};
        auto at = [&](int level) {
            Levels l = base;
            l[static_cast<std::size_t>(p)] = level;
            return encode(l);
        };
        const double gap1 = mean_abs_regret_between(at(0), at(1), cfg, 10);
        const double gap2 = mean_abs_regret_between(at(0), at(2), cfg, 10);
        CHECK(gap1 <= gap2);
    }
}
