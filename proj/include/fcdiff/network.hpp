#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fcdiff/signal_models.hpp"

namespace fcdiff {

enum class Algorithm { Dlms, Dnlms };
enum class Strategy { Cta, Atc };

std::string to_string(Algorithm a);
std::string to_string(Strategy s);

struct NodeConfig {
  double weight = 1.0;       // c_j
  double step = 0.0;         // mu_j (DLMS) or xi_j (DNLMS)
  double noise_power = 0.0;  // sigma_nj^2
  PowerProfile profile;
  InputDistribution dist = InputDistribution::gaussian();
};

/// Fusion-center network: M nodes, N-tap filters, random-walk plant.
struct NetworkConfig {
  std::vector<NodeConfig> nodes;
  PlantModel plant;
  Algorithm algorithm = Algorithm::Dlms;
  Strategy strategy = Strategy::Cta;
  double nlms_epsilon = 0.0;

  long taps() const { return plant.taps; }
  long node_count() const { return static_cast<long>(nodes.size()); }

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  Eigen::VectorXd weights() const;
  Eigen::VectorXd steps() const;
  double max_kurtosis() const;

  /// LCM of all nodal power periods, if every profile has one.
  std::optional<long> power_period_lcm(long cap = 1L << 30) const;
};

/// Rescales the node weights so they sum to one.
void normalize_weights(NetworkConfig& cfg);

}  // namespace fcdiff
