#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "fcdiff/network.hpp"

namespace fcdiff {

struct McOptions {
  long runs = 100;
  long horizon = 1000;
  std::uint64_t master_seed = 1;
  /// 0 selects FCDIFF_WORKERS from the environment, else the OpenMP default.
  int workers = 0;
  bool track_mean = true;
};

struct McResult {
  std::vector<double> msd;         // average of ||P(n)||^2, n = 0..horizon
  Eigen::MatrixXd mean_deviation;  // N x (horizon+1) average of P(n); empty if not tracked
  long runs = 0;
  long horizon = 0;
  long diverged_runs = 0;
  long skipped_updates = 0;

  bool diverged() const { return diverged_runs > 0; }
};

/// Environment variable consulted when McOptions::workers is 0.
inline constexpr const char* kWorkersEnv = "FCDIFF_WORKERS";
int resolve_workers(int requested);

/// Parallel engine. Runs are dealt to a fixed number of reduction lanes by
/// run index; each lane sums its runs in order and lanes are summed in
/// order, so the result is bitwise independent of the worker count.
McResult run_monte_carlo(const NetworkConfig& cfg, const McOptions& opts);

/// Single-threaded reference: one accumulator, runs in index order.
McResult run_monte_carlo_serial(const NetworkConfig& cfg, const McOptions& opts);

inline constexpr int kReductionLanes = 8;

}  // namespace fcdiff
