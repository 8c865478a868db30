#pragma once

#include <cmath>
#include <random>

#include "fcdiff/network.hpp"

namespace fcdiff::testing {

// M nodes with uniform weights, constant unit power, equal steps.
inline NetworkConfig simple_network(long nodes, long taps, double step, Algorithm alg = Algorithm::Dlms,
                                    InputDistribution dist = InputDistribution::gaussian()) {
  NetworkConfig cfg;
  cfg.algorithm = alg;
  cfg.plant.taps = taps;
  cfg.plant.sigma_q2 = 1e-8;
  cfg.plant.h0 = two_sided_exponential(taps, 0.5);
  for (long j = 0; j < nodes; ++j) {
    NodeConfig node;
    node.weight = 1.0 / static_cast<double>(nodes);
    node.step = step;
    node.noise_power = 1e-4;
    node.profile = PowerProfile(Constant{1.0});
    node.dist = dist;
    cfg.nodes.push_back(node);
  }
  return cfg;
}

// Heterogeneous network: random weights, powers, kurtoses and steps kept
// well inside the stability region.
inline NetworkConfig random_network(std::mt19937_64& rng, Algorithm alg, long max_nodes = 6, long max_taps = 12) {
  std::uniform_int_distribution<long> nodes_d(1, max_nodes), taps_d(2, max_taps), period_d(1, 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const InputDistribution dists[] = {InputDistribution::gaussian(), InputDistribution::uniform(),
                                     InputDistribution::laplacian(), InputDistribution::three_point(4.0)};
  NetworkConfig cfg;
  cfg.algorithm = alg;
  cfg.plant.taps = taps_d(rng);
  cfg.plant.sigma_q2 = 1e-7 * u(rng);
  cfg.plant.h0 = two_sided_exponential(cfg.plant.taps, 0.5);
  const long m = nodes_d(rng);
  double total = 0.0;
  for (long j = 0; j < m; ++j) {
    NodeConfig node;
    node.weight = 0.1 + u(rng);
    total += node.weight;
    node.noise_power = 1e-3 * u(rng);
    node.dist = dists[rng() % 4];
    const double beta = 0.5 + u(rng);
    if (u(rng) < 0.5)
      node.profile = PowerProfile::sinusoid_with_period(beta, std::ldexp(1.0, static_cast<int>(period_d(rng))));
    else
      node.profile = PowerProfile(Pulsed{beta, 0.3 * beta, 4 + period_d(rng), 0.5});
    const double n = static_cast<double>(cfg.plant.taps);
    const double half = 1.0 / (n + node.dist.kurtosis() - 1.0);
    node.step = alg == Algorithm::Dlms ? half * (0.2 + 0.5 * u(rng)) / (2.0 * beta) : n * half * (0.2 + 0.5 * u(rng));
    cfg.nodes.push_back(node);
  }
  for (auto& node : cfg.nodes) node.weight /= total;
  normalize_weights(cfg);
  return cfg;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace fcdiff::testing
