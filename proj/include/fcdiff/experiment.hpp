#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fcdiff/monte_carlo.hpp"
#include "fcdiff/network.hpp"
#include "fcdiff/theory_models.hpp"

namespace fcdiff {

struct ExperimentSpec {
  std::string name;
  NetworkConfig network;
  long runs = 100;
  long horizon = 1000;
  std::uint64_t master_seed = 1;
  TheoryModel theory_model = TheoryModel::General;
  std::string output;  // file path prefix; empty means the spec name

  void validate() const;
};

/// Theory-vs-simulation agreement for one experiment.
struct ComparisonReport {
  double steady_state_gap_db = 0.0;    // mean |10 log10(mc / theory)| over the window
  double max_transient_gap_db = 0.0;   // max |10 log10(mc / theory)| for n >= burn_in
  bool diverged = false;
  std::optional<long> ripple_period_detected;
  long burn_in = 0;
  long window = 0;
  double theory_steady_db = 0.0;
  double mc_steady_db = 0.0;
};

/// Last L samples, L = LCM of the nodal power periods capped at horizon/4
/// (horizon/4 when no common period exists), at least 1.
long steady_state_window(const NetworkConfig& cfg, long horizon);

/// First n where theory is within 3 dB of its mean over the final window.
long burn_in_index(std::span<const double> theory, long window);

/// Dominant period of a series from its mean squared difference at each
/// lag, normalized by twice the variance: after the first lag where it
/// exceeds 1, the first dip to within 10% of its minimum, located at the
/// bottom of that dip. Empty when the minimum stays above 0.5.
std::optional<long> detect_ripple_period(std::span<const double> series);

ComparisonReport compare_curves(const NetworkConfig& cfg, std::span<const double> theory, std::span<const double> mc);

struct ExperimentResult {
  McResult mc;
  TheoryTrajectory theory;                   // the spec's model (general unless slow was requested)
  std::optional<TheoryTrajectory> theory_slow;  // present for theory_model = both
  ComparisonReport report;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, int workers = 0);

/// Header `n,msd_theory,msd_mc,msd_theory_db,msd_mc_db,mean_dev_norm`; one row
/// per sample. Empty spans are written as `nan` columns.
void write_learning_curve_csv(std::ostream& os, std::span<const double> theory, std::span<const double> mc,
                              std::span<const double> mean_dev_norm);

/// ||mean deviation|| per sample from an McResult.
std::vector<double> mean_deviation_norms(const McResult& mc);

void write_report_json(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& result);

struct StabilityRow {
  double multiplier = 0.0;
  Eigen::VectorXd steps;
  bool predicted_stable = false;
  bool theory_diverged = false;
  std::optional<bool> mc_diverged;
};

/// Scales every node's step to `multiplier` times its isolated-node bound
/// (mu_j = 2m / (mean power_j (N + psi_j - 1)) for LMS, xi_j = 2mN / (N + psi_j - 1)
/// for NLMS), runs the general theory recursion (and MC when mc_runs > 0),
/// and compares with the wide-sense-stationary slow-model prediction.
std::vector<StabilityRow> compare_stability(const ExperimentSpec& spec, std::span<const double> multipliers,
                                            long mc_runs = 0, int workers = 0);

/// Slow-model transient factor evaluated with every profile replaced by its
/// mean power; < 1 predicts mean-square stability.
double wss_transient_factor(const NetworkConfig& cfg);

}  // namespace fcdiff
