#include "fcdiff/builtins.hpp"

#include <cmath>

namespace fcdiff {

namespace {

constexpr long kNodes = 10;
constexpr long kTaps = 32;
constexpr double kNoisePower = 1e-6;
constexpr double kSigmaQ2 = 64e-8 / static_cast<double>(kTaps);

struct Scenario {
  const char* name;
  Algorithm algorithm;
  InputDistribution dist;
  double multiplier;  // of the half-bound step 1/(N+psi-1) or N/(N+psi-1)
  long horizon;
};

// Horizons cover the transient plus at least two periods of the slowest
// nodal power (2^10 samples).
const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> s = {
      {"fig3a", Algorithm::Dlms, InputDistribution::uniform(), 1.0, 4096},
      {"fig3b", Algorithm::Dlms, InputDistribution::uniform(), 4.0, 4096},
      {"fig4", Algorithm::Dlms, InputDistribution::laplacian(), 1.0, 4096},
      {"fig5", Algorithm::Dlms, InputDistribution::gaussian_fifth_power(), 1.0, 12288},
      {"fig6a", Algorithm::Dnlms, InputDistribution::uniform(), 1.0, 4096},
      {"fig6b", Algorithm::Dnlms, InputDistribution::uniform(), 4.0, 4096},
      {"fig7", Algorithm::Dnlms, InputDistribution::laplacian(), 1.0, 4096},
      {"fig8", Algorithm::Dnlms, InputDistribution::gaussian_fifth_power(), 1.0, 12288},
  };
  return s;
}

// Nodes 1-4 uniform, 5-7 Laplacian, 8-10 Gaussian fifth power;
// beta_j = 1 for j <= 5 and 0.1 for j >= 6.
ExperimentSpec mixed(const std::string& name, Algorithm algorithm) {
  NetworkConfig cfg = reference_network(algorithm, InputDistribution::uniform(), 0.0);
  for (long j = 0; j < kNodes; ++j) {
    auto& node = cfg.nodes[j];
    if (j < 4)
      node.dist = InputDistribution::uniform();
    else if (j < 7)
      node.dist = InputDistribution::laplacian();
    else
      node.dist = InputDistribution::gaussian_fifth_power();
    const double beta = j < 5 ? 1.0 : 0.1;
    node.profile = PowerProfile::sinusoid_with_period(beta, std::ldexp(1.0, static_cast<int>(j + 1)));
    const double psi = node.dist.kurtosis();
    node.step = algorithm == Algorithm::Dlms ? 1.0 / (beta * (kTaps + psi - 1.0)) : isolated_nlms_step(kTaps, psi);
  }
  ExperimentSpec spec;
  spec.name = name;
  spec.network = std::move(cfg);
  spec.runs = 100;
  spec.horizon = 12288;
  spec.output = name;
  return spec;
}

}  // namespace

double isolated_lms_step(long taps, double kurtosis) { return 1.0 / (static_cast<double>(taps) + kurtosis - 1.0); }

double isolated_nlms_step(long taps, double kurtosis) {
  return static_cast<double>(taps) / (static_cast<double>(taps) + kurtosis - 1.0);
}

NetworkConfig reference_network(Algorithm algorithm, const InputDistribution& dist, double step) {
  NetworkConfig cfg;
  cfg.algorithm = algorithm;
  cfg.strategy = Strategy::Cta;
  cfg.plant.taps = kTaps;
  cfg.plant.sigma_q2 = kSigmaQ2;
  cfg.plant.h0 = two_sided_exponential(kTaps, 0.5);
  for (long j = 0; j < kNodes; ++j) {
    NodeConfig node;
    node.weight = 1.0 / static_cast<double>(kNodes);
    node.step = step;
    node.noise_power = kNoisePower;
    node.profile = PowerProfile::sinusoid_with_period(1.0, std::ldexp(1.0, static_cast<int>(j + 1)));
    node.dist = dist;
    cfg.nodes.push_back(node);
  }
  return cfg;
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& s : scenarios()) names.emplace_back(s.name);
  names.emplace_back("fig9");
  names.emplace_back("fig10");
  return names;
}

std::optional<ExperimentSpec> builtin_spec(const std::string& name) {
  if (name == "fig9") return mixed(name, Algorithm::Dlms);
  if (name == "fig10") return mixed(name, Algorithm::Dnlms);
  for (const auto& s : scenarios()) {
    if (name != s.name) continue;
    const double psi = s.dist.kurtosis();
    const double step = s.multiplier * (s.algorithm == Algorithm::Dlms ? isolated_lms_step(kTaps, psi)
                                                                       : isolated_nlms_step(kTaps, psi));
    ExperimentSpec spec;
    spec.name = name;
    spec.network = reference_network(s.algorithm, s.dist, step);
    spec.runs = 100;
    spec.horizon = s.horizon;
    spec.output = name;
    return spec;
  }
  return std::nullopt;
}

}  // namespace fcdiff
