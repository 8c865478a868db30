#include "fcdiff/monte_carlo.hpp"

#include <omp.h>

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fcdiff/diffusion_sim.hpp"

namespace fcdiff {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kWorkersEnv)) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

namespace {

void check(const NetworkConfig& cfg, const McOptions& opts) {
  cfg.validate();
  if (opts.runs < 1) throw std::invalid_argument("monte carlo: runs must be >= 1");
  if (opts.horizon < 1) throw std::invalid_argument("monte carlo: horizon must be >= 1");
}

struct Accumulator {
  std::vector<double> msd;
  Eigen::MatrixXd deviation;
  long diverged = 0;
  long skipped = 0;

  Accumulator(const NetworkConfig& cfg, const McOptions& opts) : msd(opts.horizon + 1, 0.0) {
    if (opts.track_mean) deviation = Eigen::MatrixXd::Zero(cfg.taps(), opts.horizon + 1);
  }

  void add_run(const NetworkConfig& cfg, const McOptions& opts, long run) {
    const auto out = accumulate_run(cfg, opts.master_seed, static_cast<std::uint64_t>(run), opts.horizon, msd,
                                    opts.track_mean ? &deviation : nullptr);
    diverged += out.diverged ? 1 : 0;
    skipped += out.skipped_updates;
  }
};

McResult finish(Accumulator&& acc, const McOptions& opts) {
  McResult r;
  const double inv = 1.0 / static_cast<double>(opts.runs);
  r.msd = std::move(acc.msd);
  for (auto& v : r.msd) v *= inv;
  if (opts.track_mean) r.mean_deviation = std::move(acc.deviation) * inv;
  r.runs = opts.runs;
  r.horizon = opts.horizon;
  r.diverged_runs = acc.diverged;
  r.skipped_updates = acc.skipped;
  return r;
}

}  // namespace

McResult run_monte_carlo(const NetworkConfig& cfg, const McOptions& opts) {
  check(cfg, opts);
  const int lanes = static_cast<int>(std::min<long>(kReductionLanes, opts.runs));
  std::vector<Accumulator> acc;
  acc.reserve(lanes);
  for (int l = 0; l < lanes; ++l) acc.emplace_back(cfg, opts);

  const int workers = resolve_workers(opts.workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int l = 0; l < lanes; ++l)
    for (long run = l; run < opts.runs; run += lanes) acc[l].add_run(cfg, opts, run);

  Accumulator total = std::move(acc[0]);
  for (int l = 1; l < lanes; ++l) {
    for (std::size_t n = 0; n < total.msd.size(); ++n) total.msd[n] += acc[l].msd[n];
    if (opts.track_mean) total.deviation += acc[l].deviation;
    total.diverged += acc[l].diverged;
    total.skipped += acc[l].skipped;
  }
  return finish(std::move(total), opts);
}

McResult run_monte_carlo_serial(const NetworkConfig& cfg, const McOptions& opts) {
  check(cfg, opts);
  Accumulator acc(cfg, opts);
  for (long run = 0; run < opts.runs; ++run) acc.add_run(cfg, opts, run);
  return finish(std::move(acc), opts);
}

}  // namespace fcdiff
