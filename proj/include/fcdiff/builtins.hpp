#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fcdiff/experiment.hpp"

namespace fcdiff {

/// The ten published scenarios: M = 10, N = 32, 100 runs, sinusoidal powers
/// with omega_j = 2 pi / 2^j, h0 a two-sided exponential (decay 0.5),
/// sigma_q^2 = 64e-8 / N, sigma_n^2 = 1e-6, uniform weights.
std::vector<std::string> builtin_names();
std::optional<ExperimentSpec> builtin_spec(const std::string& name);

/// Shared scenario skeleton without steps or distributions filled in.
NetworkConfig reference_network(Algorithm algorithm, const InputDistribution& dist, double step);

/// 1 / (N + psi - 1): half the isolated-node LMS bound at unit power.
double isolated_lms_step(long taps, double kurtosis);
/// N / (N + psi - 1): half the isolated-node NLMS bound.
double isolated_nlms_step(long taps, double kurtosis);

}  // namespace fcdiff
