#include "fcdiff/network.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fcdiff {

std::string to_string(Algorithm a) { return a == Algorithm::Dlms ? "dlms" : "dnlms"; }
std::string to_string(Strategy s) { return s == Strategy::Cta ? "cta" : "atc"; }

void NetworkConfig::validate() const {
  if (nodes.empty()) throw std::invalid_argument("network: M must be >= 1");
  plant.validate();
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const auto& node = nodes[j];
    const std::string where = "node " + std::to_string(j + 1) + ": ";
    if (!(node.weight > 0.0)) throw std::invalid_argument(where + "weight c must be > 0");
    if (!(node.step >= 0.0)) throw std::invalid_argument(where + "step size must be >= 0");
    if (!(node.noise_power >= 0.0)) throw std::invalid_argument(where + "noise power must be >= 0");
    sum += node.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("network: weights must sum to 1 (got " + std::to_string(sum) + ")");
  if (!(nlms_epsilon >= 0.0)) throw std::invalid_argument("network: nlms_epsilon must be >= 0");
}

Eigen::VectorXd NetworkConfig::weights() const {
  Eigen::VectorXd c(node_count());
  for (long j = 0; j < node_count(); ++j) c[j] = nodes[j].weight;
  return c;
}

Eigen::VectorXd NetworkConfig::steps() const {
  Eigen::VectorXd s(node_count());
  for (long j = 0; j < node_count(); ++j) s[j] = nodes[j].step;
  return s;
}

double NetworkConfig::max_kurtosis() const {
  double psi = 0.0;
  for (const auto& n : nodes) psi = std::max(psi, n.dist.kurtosis());
  return psi;
}

std::optional<long> NetworkConfig::power_period_lcm(long cap) const {
  long l = 1;
  for (const auto& n : nodes) {
    const auto p = n.profile.period();
    if (!p) return std::nullopt;
    l = std::lcm(l, *p);
    if (l > cap) return std::nullopt;
  }
  return l;
}

void normalize_weights(NetworkConfig& cfg) {
  double sum = 0.0;
  for (const auto& n : cfg.nodes) sum += n.weight;
  for (auto& n : cfg.nodes) n.weight /= sum;
}

}  // namespace fcdiff
