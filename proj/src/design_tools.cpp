#include "fcdiff/design_tools.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fcdiff {

DesignInput DesignInput::uniform(long nodes, long taps, double kurtosis) {
  DesignInput d;
  d.nodes = nodes;
  d.taps = taps;
  d.kurtoses = Eigen::VectorXd::Constant(nodes, kurtosis);
  return d;
}

Eigen::VectorXd DesignInput::effective_weights() const {
  if (weights) return *weights;
  return Eigen::VectorXd::Constant(nodes, 1.0 / static_cast<double>(nodes));
}

void DesignInput::validate() const {
  if (nodes < 1) throw std::invalid_argument("design: M must be >= 1");
  if (taps < 1) throw std::invalid_argument("design: N must be >= 1");
  if (kurtoses.size() != nodes) throw std::invalid_argument("design: need one kurtosis per node");
  for (Eigen::Index j = 0; j < kurtoses.size(); ++j)
    if (!(kurtoses[j] >= 1.0)) throw std::invalid_argument("design: kurtosis must be >= 1");
  if (snrs.size() != 0) {
    if (snrs.size() != nodes) throw std::invalid_argument("design: need one SNR per node");
    for (Eigen::Index j = 0; j < snrs.size(); ++j)
      if (!(snrs[j] > 0.0)) throw std::invalid_argument("design: SNR must be > 0");
  }
  if (weights) {
    if (weights->size() != nodes) throw std::invalid_argument("design: need one weight per node");
    for (Eigen::Index j = 0; j < weights->size(); ++j)
      if (!((*weights)[j] > 0.0)) throw std::invalid_argument("design: weights must be > 0");
    if (std::abs(weights->sum() - 1.0) > 1e-12) throw std::invalid_argument("design: weights must sum to 1");
  }
  if (!(sigma_q2 >= 0.0)) throw std::invalid_argument("design: sigma_q2 must be >= 0");
}

namespace {

double weighted_spread(const DesignInput& d) {
  const double big_n = static_cast<double>(d.taps);
  const Eigen::VectorXd c = d.effective_weights();
  return (c.array().square() * (d.kurtoses.array() + big_n - 2.0)).sum();
}

Eigen::VectorXd speed_eta(const DesignInput& d) {
  const double big_n = static_cast<double>(d.taps);
  Eigen::VectorXd eta = (d.kurtoses.array() + big_n - 2.0).inverse();
  return eta;
}

}  // namespace

double dlms_stability_bound(const DesignInput& d) {
  d.validate();
  return 2.0 / (1.0 + weighted_spread(d));
}

double dnlms_stability_bound(const DesignInput& d) {
  d.validate();
  return 2.0 * static_cast<double>(d.taps) / (1.0 + weighted_spread(d));
}

double dnlms_stability_bound_optimal(const DesignInput& d) {
  d.validate();
  const double s = speed_eta(d).sum();
  return 2.0 * static_cast<double>(d.taps) * s / (s + 1.0);
}

WeightedSquareMinimum min_weighted_square(const Eigen::VectorXd& eta) {
  if (eta.size() == 0) throw std::invalid_argument("min_weighted_square: empty eta");
  for (Eigen::Index j = 0; j < eta.size(); ++j)
    if (!(eta[j] > 0.0))
      throw std::invalid_argument("min_weighted_square: eta_" + std::to_string(j + 1) + " must be > 0");
  const double total = eta.sum();
  return WeightedSquareMinimum{eta / total, 1.0 / total};
}

SnrWeights optimal_weights_snr(const DesignInput& d) {
  if (d.snrs.size() != d.nodes) throw std::invalid_argument("optimal_weights_snr: need one SNR per node");
  const auto best = min_weighted_square(d.snrs);
  return SnrWeights{best.weights, best.minimum};
}

double min_steady_state_msd_dlms(const DesignInput& d, double lambda) {
  const double big_n = static_cast<double>(d.taps);
  const double total = d.snrs.sum();
  return 0.5 * (big_n * lambda / total + big_n * d.sigma_q2 / lambda);
}

double min_steady_state_msd_dnlms(const DesignInput& d, double xi) {
  const double big_n = static_cast<double>(d.taps);
  const double total = d.snrs.sum();
  return 0.5 * (xi / total + big_n * big_n * d.sigma_q2 / xi);
}

SpeedWeights optimal_weights_speed(const DesignInput& d) {
  const double big_n = static_cast<double>(d.taps);
  for (Eigen::Index j = 0; j < d.kurtoses.size(); ++j)
    if (!(d.kurtoses[j] + big_n - 2.0 > 0.0))
      throw std::invalid_argument("optimal_weights_speed: psi_j + N - 2 must be > 0");
  const auto best = min_weighted_square(speed_eta(d));
  return SpeedWeights{best.weights, best.minimum};
}

}  // namespace fcdiff
