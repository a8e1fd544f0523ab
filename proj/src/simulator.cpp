#include "csmcover/simulator.hpp"

#include <cmath>
#include <random>

#include "csmcover/errors.hpp"
#include "csmcover/util.hpp"

namespace csmcover {

void validate_config(const SimulatorConfig& cfg) {
    if (cfg.dimension < 1) throw ValidationError("simulator dimension must be at least 1");
    if (cfg.samples_per_class < 2) throw ValidationError("simulator needs at least 2 samples per class");
    // Zero shift is allowed: it yields indistinguishable classes.
    if (!(cfg.payload_shift >= 0.0) || !std::isfinite(cfg.payload_shift)) {
        throw ValidationError("payload shift must be a finite non-negative number");
    }
    if (!(cfg.base_noise > 0.0) || !std::isfinite(cfg.base_noise)) {
        throw ValidationError("base noise must be positive");
    }
    for (auto p : kAllParameters) {
        const double a = cfg.sensitivity_of(p);
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw ValidationError("sensitivity for " + std::string(parameter_name(p)) + " must be non-negative");
        }
    }
    if (!(cfg.mean_coupling >= 0.0) || !std::isfinite(cfg.mean_coupling)) {
        throw ValidationError("mean coupling must be non-negative");
    }
}

Eigen::VectorXd noise_scales(const PipelineDescriptor& desc, const SimulatorConfig& cfg) {
    const auto a = [&](Parameter p) { return cfg.sensitivity_of(p); };
    const auto lv = [&](Parameter p) { return static_cast<double>(desc.level(p)); };
    const double common = cfg.base_noise *
                          (1.0 + a(Parameter::Denoising) * (2.0 - lv(Parameter::Denoising))) *
                          (1.0 + a(Parameter::SharpenMicro) * lv(Parameter::SharpenMicro)) *
                          (1.0 + a(Parameter::PostResizeSharpening) * lv(Parameter::PostResizeSharpening)) *
                          (1.0 + a(Parameter::Downsampling) * lv(Parameter::Downsampling));
    const int d = cfg.dimension;
    Eigen::VectorXd s(d);
    for (int j = 0; j < d; ++j) {
        const double modulation = d == 1 ? 1.0 : static_cast<double>(j) / static_cast<double>(d - 1);
        const double g = modulation * lv(Parameter::Demosaicking) / 2.0;
        s[j] = common * (1.0 + a(Parameter::Demosaicking) * g);
    }
    return s;
}

SourceDataset simulate_source(const PipelineDescriptor& desc, const SimulatorConfig& cfg) {
    validate_config(cfg);
    const int d = cfg.dimension;
    const Eigen::VectorXd scale = noise_scales(desc, cfg);
    const Eigen::VectorXd mean = (cfg.mean_coupling / std::sqrt(static_cast<double>(d))) * scale;
    const Eigen::VectorXd shift =
        Eigen::VectorXd::Constant(d, cfg.payload_shift / std::sqrt(static_cast<double>(d)));

    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(desc.index)));
    std::normal_distribution<double> normal(0.0, 1.0);

    const int n_train = cfg.samples_per_class / 2;
    const int n_test = cfg.samples_per_class - n_train;

    auto fill = [&](int covers) {
        Split split;
        split.features.resize(2 * covers, d);
        split.labels.resize(static_cast<std::size_t>(2 * covers));
        for (int i = 0; i < covers; ++i) {
            Eigen::VectorXd x(d);
            for (int j = 0; j < d; ++j) x[j] = mean[j] + scale[j] * normal(rng);
            split.features.row(2 * i) = x.transpose();
            split.features.row(2 * i + 1) = (x + shift).transpose();
            split.labels[static_cast<std::size_t>(2 * i)] = Label::Cover;
            split.labels[static_cast<std::size_t>(2 * i + 1)] = Label::Stego;
        }
        return split;
    };

    SourceDataset ds;
    ds.source_id = desc.index;
    ds.train = fill(n_train);
    ds.test = fill(n_test);
    return ds;
}

std::vector<SourceDataset> simulate_sources(const std::vector<int>& indices, const SimulatorConfig& cfg) {
    std::vector<SourceDataset> out;
    out.reserve(indices.size());
    for (int idx : indices) out.push_back(simulate_source(PipelineDescriptor::from_index(idx), cfg));
    return out;
}

}  // namespace csmcover
