#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fcdiff/network.hpp"

namespace fcdiff {

/// Diagonal second moments K_ii(n) = E{P_i(n)^2} and mean deviation E{P(n)}.
/// Only the diagonal is propagated: for white regressors the per-tap
/// recursion closes on the diagonal.
struct TheoryState {
  Eigen::VectorXd k_diag;
  Eigen::VectorXd mean_dev;
  long n = 0;

  double msd() const { return k_diag.sum(); }
};

/// K_ii(0) = h0[i]^2, E{P(0)} = -h0 (zero initial weights).
TheoryState initial_theory_state(const NetworkConfig& cfg);

/// N x M matrix with entry (k, j) = sigma_xj^2(n - k), k = 0..N-1.
Eigen::MatrixXd lagged_powers(const NetworkConfig& cfg, long n);

/// (1/N) sum_{k<N} sigma^2(n - k)
double window_mean_power(const PowerProfile& profile, long n, long taps);

/// NLMS-equivalent LMS step sizes mu_j(n) = xi_j / (N * window_mean_power_j(n)).
/// A node whose window power is zero gets step 0.
Eigen::VectorXd dnlms_equivalent_steps(const NetworkConfig& cfg, long n);

/// Per-tap recursion coefficients
///   K_ii(n+1) = K_ii(n) - alpha_i K_ii(n) + sum_{r != i} beta_ir K_rr(n) + gamma_i.
/// beta is stored as a full N x N matrix with a zero diagonal.
struct TheoryCoefficients {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd beta;
  Eigen::VectorXd gamma;
};

/// LMS coefficients for the given per-node step sizes.
TheoryCoefficients dlms_coefficients(const NetworkConfig& cfg, long n, const Eigen::VectorXd& steps);
/// LMS coefficients with the configured steps mu_j.
TheoryCoefficients dlms_coefficients(const NetworkConfig& cfg, long n);
/// NLMS coefficients written out with the window-averaged input power in the
/// normalization; xi_j are the configured steps.
TheoryCoefficients dnlms_coefficients(const NetworkConfig& cfg, long n);

// ---- general (any rate of power variation) --------------------------------

TheoryState mean_step_dlms(const TheoryState& s, const NetworkConfig& cfg);
TheoryState mean_step_dnlms(const TheoryState& s, const NetworkConfig& cfg);
TheoryState msd_step_dlms_general(const TheoryState& s, const NetworkConfig& cfg);
TheoryState msd_step_dnlms_general(const TheoryState& s, const NetworkConfig& cfg);

// ---- slowly varying powers ------------------------------------------------

/// Scalar MSD recursion MSD(n+1) = transient * MSD(n) + forcing.
/// For NLMS, `transient` does not depend on the input powers.
struct SlowMsdCoefficients {
  double transient = 0.0;
  double forcing = 0.0;
};

SlowMsdCoefficients slow_msd_coefficients(const NetworkConfig& cfg, long n);

/// Mean factor 1 - sum_j c_j mu_j sigma_xj^2(n) (LMS) or 1 - sum_j c_j xi_j / N (NLMS).
double slow_mean_factor(const NetworkConfig& cfg, long n);

/// One step of the slow-power model in per-tap form (tap-independent
/// alpha, beta, gamma); the tap sum follows the scalar recursion. Also
/// advances the mean with slow_mean_factor. Dispatches on cfg.algorithm.
TheoryState msd_step_slow(const TheoryState& s, const NetworkConfig& cfg);

/// Transient factor of the NLMS slow model with a common step xi:
/// 1 - 2xi/N + (xi^2/N^2)(sum_j c_j^2 (psi_j + N - 2) + 1).
double dnlms_transient_factor(const Eigen::VectorXd& weights, const Eigen::VectorXd& kurtoses, long taps, double xi);

// ---- steady state ---------------------------------------------------------

class NonPositiveDenominator : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct SteadyState {
  double msd = 0.0;
  /// True when the input powers vary in time: the value is the pointwise
  /// fixed point MSD(n+1) ~ MSD(n) of the slow model, not an exact limit.
  bool approximate = false;
};

/// Fixed point of the slow-model recursion at phase n.
/// Throws NonPositiveDenominator when 1 - transient <= 0.
SteadyState steady_state_msd(const NetworkConfig& cfg, long n);

/// Wide-sense stationary network summary used by the closed forms.
struct WssNetwork {
  long taps = 0;
  Eigen::VectorXd weights;   // c_j
  Eigen::VectorXd kurtoses;  // psi_j
  Eigen::VectorXd snrs;      // rho_j = sigma_xj^2 / sigma_nj^2
  double sigma_q2 = 0.0;
};

/// LMS with mu_j = lambda / sigma_xj^2:
///   MSD(n+1) = {1 - 2 lambda + lambda^2 sum_j c_j^2 (psi_j + N - 2) + lambda^2} MSD(n)
///              + N lambda^2 sum_j c_j^2 / rho_j + N sigma_q^2
SlowMsdCoefficients wss_dlms_coefficients(const WssNetwork& w, double lambda);
/// NLMS with common xi:
///   MSD(n+1) = A MSD(n) + (xi^2 / N) sum_j c_j^2 / rho_j + N sigma_q^2
SlowMsdCoefficients wss_dnlms_coefficients(const WssNetwork& w, double xi);

/// Small-step approximations: 1/2 [N lambda sum c_j^2/rho_j + N sigma_q^2 / lambda]
double wss_small_step_msd_dlms(const WssNetwork& w, double lambda);
/// xi/2 sum c_j^2/rho_j + N^2 sigma_q^2 / (2 xi)
double wss_small_step_msd_dnlms(const WssNetwork& w, double xi);

struct ScalarIteration {
  bool converged = false;
  bool diverged = false;
  double value = 0.0;
  long steps = 0;
};

/// Iterates x <- a x + b from x0 until |dx| <= tol * |x| (converged), x
/// exceeds divergence_factor * x0 or turns non-finite (diverged), or
/// max_steps is reached.
ScalarIteration iterate_scalar_recursion(const SlowMsdCoefficients& c, double x0, long max_steps, double tol = 1e-14,
                                         double divergence_factor = 1e12);

// ---- trajectories ---------------------------------------------------------

enum class TheoryModel { General, Slow, Both };

inline constexpr double kTheoryDivergenceFactor = 1e12;

std::string to_string(TheoryModel m);

struct TheoryTrajectory {
  std::vector<double> msd;            // n = 0..horizon
  std::vector<double> mean_dev_norm;  // ||E{P(n)}||
  std::vector<std::string> warnings;
  bool diverged = false;
};

/// Runs the general (model = General) or slow (model = Slow) recursions.
TheoryTrajectory run_theory(const NetworkConfig& cfg, long horizon, TheoryModel model);

}  // namespace fcdiff
