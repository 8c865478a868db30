#pragma once

#include <optional>

#include <Eigen/Core>

namespace fcdiff {

/// Inputs to the closed-form design formulas. Bounds are stated for the
/// wide-sense stationary, slow-power regime.
struct DesignInput {
  long nodes = 1;               // M
  long taps = 1;                // N
  Eigen::VectorXd kurtoses;     // psi_j, size M
  Eigen::VectorXd snrs;         // rho_j, size M (only for SNR weighting)
  std::optional<Eigen::VectorXd> weights;  // c_j; uniform when absent
  double sigma_q2 = 0.0;

  /// Equal kurtosis psi and uniform weights for M nodes.
  static DesignInput uniform(long nodes, long taps, double kurtosis);

  Eigen::VectorXd effective_weights() const;
  /// Throws std::invalid_argument on psi_j < 1, rho_j <= 0, or invalid weights.
  void validate() const;
};

/// Supremum of the normalized LMS step lambda (mu_j = lambda / sigma_xj^2):
/// 2 / (1 + sum_j c_j^2 (psi_j + N - 2)). For M = 1 this is the
/// isolated-node bound 2 / (N + psi - 1).
double dlms_stability_bound(const DesignInput& d);

/// Supremum of the NLMS step xi: 2N / (1 + sum_j c_j^2 (psi_j + N - 2)).
double dnlms_stability_bound(const DesignInput& d);

/// The NLMS bound at the speed-optimal weights:
/// 2N S / (S + 1), S = sum_k (psi_k + N - 2)^-1.
double dnlms_stability_bound_optimal(const DesignInput& d);

/// Mean-weight bound for the normalized LMS step: 0 < lambda < 2.
inline constexpr double kDlmsMeanBound = 2.0;

struct WeightedSquareMinimum {
  Eigen::VectorXd weights;
  double minimum = 0.0;
};

/// Minimizes f(c) = sum_j c_j^2 / eta_j over the simplex sum_j c_j = 1:
/// c_k = eta_k / sum eta, f_min = 1 / sum eta. Throws on any eta_j <= 0.
WeightedSquareMinimum min_weighted_square(const Eigen::VectorXd& eta);

struct SnrWeights {
  Eigen::VectorXd weights;
  double min_noise_term = 0.0;  // min of sum_j c_j^2 / rho_j = 1 / sum rho
};

/// Weights minimizing the small-step steady-state MSD: c_j = rho_j / sum rho.
SnrWeights optimal_weights_snr(const DesignInput& d);

/// Minimum small-step steady-state MSD with SNR-optimal weights.
/// LMS:  1/2 [N lambda / sum rho + N sigma_q^2 / lambda]
double min_steady_state_msd_dlms(const DesignInput& d, double lambda);
/// NLMS: 1/2 [xi / sum rho + N^2 sigma_q^2 / xi]
double min_steady_state_msd_dnlms(const DesignInput& d, double xi);

struct SpeedWeights {
  Eigen::VectorXd weights;
  double min_spread = 0.0;  // min of sum_j c_j^2 (psi_j + N - 2)
};

/// Weights maximizing convergence speed: c_j proportional to (psi_j + N - 2)^-1.
SpeedWeights optimal_weights_speed(const DesignInput& d);

}  // namespace fcdiff
