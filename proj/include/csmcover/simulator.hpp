#ifndef CSMCOVER_SIMULATOR_HPP
#define CSMCOVER_SIMULATOR_HPP

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "csmcover/detector.hpp"
#include "csmcover/grid.hpp"

namespace csmcover {

/// Synthetic cover source. A pipeline reshapes the per-coordinate noise
/// scale of Gaussian covers:
///
///   s_j = base_noise * (1 + a_denoise (2 - L_denoise)) * (1 + a_sharpen_micro L_sharpen_micro)
///       * (1 + a_post_sharpen L_post_sharpen) * (1 + a_downsample L_downsample)
///       * (1 + a_demosaick g_j(L_demosaick)),      g_j(L) = m_j L / 2,  m_j = j / (D - 1)
///
/// Covers are x ~ N(mean_coupling * s / sqrt(D), diag(s^2)); the mean term
/// models energy-type features whose level follows the noise strength, and
/// its projection on u is mean_coupling times the average scale. Stegos are
/// the same covers shifted by payload_shift * u with u = (1, ..., 1) / sqrt(D).
struct SimulatorConfig {
    int dimension = 64;
    int samples_per_class = 200;
    double payload_shift = 3.0;
    double base_noise = 0.1;
    /// Indexed by Parameter.
    std::array<double, kParameterCount> sensitivity{0.05, 1.5, 0.05, 0.5, 0.8};
    double mean_coupling = 2.0;
    std::uint64_t seed = 0;

    double& sensitivity_of(Parameter p) { return sensitivity[static_cast<std::size_t>(p)]; }
    double sensitivity_of(Parameter p) const { return sensitivity[static_cast<std::size_t>(p)]; }
};

void validate_config(const SimulatorConfig& cfg);

/// Per-coordinate noise scale s for a pipeline.
Eigen::VectorXd noise_scales(const PipelineDescriptor& desc, const SimulatorConfig& cfg);

/// Deterministic in (desc.index, cfg). The source id is the pipeline index.
/// Train and test each hold floor/ceil halves of samples_per_class covers
/// plus their stegos.
SourceDataset simulate_source(const PipelineDescriptor& desc, const SimulatorConfig& cfg);

std::vector<SourceDataset> simulate_sources(const std::vector<int>& indices, const SimulatorConfig& cfg);

}  // namespace csmcover

#endif
