#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fcdiff/network.hpp"
#include "fcdiff/signal_models.hpp"

namespace fcdiff {

/// Random streams of one Monte Carlo run: one input and one noise stream per
/// node plus one plant stream, all keyed by (master seed, run, node, role).
class RunStreams {
 public:
  RunStreams(const NetworkConfig& cfg, std::uint64_t master_seed, std::uint64_t run);

  /// x_j(n) = sigma_xj(n) * s_j(n)
  double next_input(long node, long n);
  /// Gaussian measurement noise with power sigma_nj^2.
  double next_noise(long node);
  /// Plant increment Q(n); draws nothing when sigma_q2 == 0.
  void next_increment(Eigen::Ref<Eigen::VectorXd> q);

 private:
  const NetworkConfig* cfg_;
  std::vector<RngStream> input_;
  std::vector<RngStream> noise_;
  RngStream plant_;
  std::vector<double> noise_sd_;
  double plant_sd_;
};

/// Per-run simulation state at time n.
///   node_weights: N x M. CTA: W_j(n). ATC: intermediate theta_j(n).
///   common:       ATC common estimate W(n); unused by CTA.
///   regressors:   N x M, column j holds X_j(n) = [x_j(n), ..., x_j(n-N+1)].
struct McRunState {
  Eigen::MatrixXd node_weights;
  Eigen::VectorXd common;
  Eigen::VectorXd plant;
  Eigen::MatrixXd regressors;
  Eigen::VectorXd increment;
  long skipped_updates = 0;
};

/// W_j(0) = 0, W(0) = 0, H(0) = h0; X_j(0) is filled with samples drawn at
/// times -(N-1)..0 so the first update already sees a full regressor.
McRunState init_run_state(const NetworkConfig& cfg, RunStreams& streams);

/// P(n): sum_j c_j W_j(n) - H(n) for CTA, W(n) - H(n) for ATC.
Eigen::VectorXd fusion_deviation(const McRunState& state, const NetworkConfig& cfg);

void cta_dlms_step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams);
void atc_dlms_step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams);
void cta_dnlms_step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams);
void atc_dnlms_step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams);

/// Dispatches on cfg.algorithm / cfg.strategy.
void step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams);

struct RunOutcome {
  bool diverged = false;
  long stopped_at = -1;  // first n flagged as diverged
  long skipped_updates = 0;
};

inline constexpr double kDivergenceFactor = 1e12;

/// Simulates one run over n = 0..horizon and adds ||P(n)||^2 into msd_sum[n]
/// and P(n) into deviation_sum->col(n) (when non-null). A run whose
/// ||P(n)||^2 exceeds divergence_factor * ||P(0)||^2 (divergence_factor alone
/// when P(0) = 0) or turns non-finite
/// is stopped; later samples contribute +inf / NaN.
RunOutcome accumulate_run(const NetworkConfig& cfg, std::uint64_t master_seed, std::uint64_t run, long horizon,
                          std::span<double> msd_sum, Eigen::MatrixXd* deviation_sum,
                          double divergence_factor = kDivergenceFactor);

/// Full fusion-deviation trajectory of one run (N x (horizon+1)).
struct RunTrace {
  Eigen::MatrixXd deviation;
  std::vector<double> msd;
  RunOutcome outcome;
};

RunTrace trace_run(const NetworkConfig& cfg, std::uint64_t master_seed, std::uint64_t run, long horizon);

}  // namespace fcdiff
