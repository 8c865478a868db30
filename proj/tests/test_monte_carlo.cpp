#include <gtest/gtest.h>

#include <cstdlib>

#include "fcdiff/diffusion_sim.hpp"
#include "fcdiff/monte_carlo.hpp"
#include "support.hpp"

using namespace fcdiff;
using fcdiff::testing::random_network;
using fcdiff::testing::rel_diff;
using fcdiff::testing::simple_network;

TEST(MonteCarlo, FrozenNoiselessIsConstant) {
  NetworkConfig cfg = simple_network(3, 6, 0.0);
  cfg.plant.sigma_q2 = 0.0;
  for (auto& node : cfg.nodes) node.noise_power = 0.0;
  const McResult r = run_monte_carlo(cfg, {1, 30, 1, 1, true});
  for (double v : r.msd) EXPECT_EQ(v, cfg.plant.h0.squaredNorm());
}

TEST(MonteCarlo, SameSeedBitwiseIdentical) {
  std::mt19937_64 rng(3);
  const NetworkConfig cfg = random_network(rng, Algorithm::Dlms);
  const McOptions opts{20, 200, 99, 2, true};
  const McResult a = run_monte_carlo(cfg, opts);
  const McResult b = run_monte_carlo(cfg, opts);
  EXPECT_EQ(a.msd, b.msd);
  EXPECT_EQ(a.mean_deviation, b.mean_deviation);
}

TEST(MonteCarlo, IndependentOfWorkerCount) {
  std::mt19937_64 rng(4);
  const NetworkConfig cfg = random_network(rng, Algorithm::Dnlms);
  McOptions opts{23, 150, 5, 1, true};
  const McResult one = run_monte_carlo(cfg, opts);
  for (int workers : {2, 3, 8, 13}) {
    opts.workers = workers;
    const McResult many = run_monte_carlo(cfg, opts);
    EXPECT_EQ(one.msd, many.msd) << workers;
    EXPECT_EQ(one.mean_deviation, many.mean_deviation) << workers;
  }
}

TEST(MonteCarlo, ParallelMatchesSerialReference) {
  std::mt19937_64 rng(6);
  const NetworkConfig cfg = random_network(rng, Algorithm::Dlms);
  const McOptions opts{17, 120, 8, 4, true};
  const McResult par = run_monte_carlo(cfg, opts);
  const McResult ser = run_monte_carlo_serial(cfg, opts);
  ASSERT_EQ(par.msd.size(), ser.msd.size());
  for (std::size_t n = 0; n < par.msd.size(); ++n) EXPECT_LE(rel_diff(par.msd[n], ser.msd[n]), 1e-13) << n;
  EXPECT_LE((par.mean_deviation - ser.mean_deviation).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(MonteCarlo, AveragesSingleRunTraces) {
  std::mt19937_64 rng(9);
  const NetworkConfig cfg = random_network(rng, Algorithm::Dlms);
  const long runs = 5, horizon = 60;
  const McResult r = run_monte_carlo_serial(cfg, {runs, horizon, 12, 1, true});
  std::vector<double> expected(horizon + 1, 0.0);
  for (long k = 0; k < runs; ++k) {
    const RunTrace t = trace_run(cfg, 12, k, horizon);
    for (long n = 0; n <= horizon; ++n) expected[n] += t.msd[n];
  }
  for (long n = 0; n <= horizon; ++n) EXPECT_LE(rel_diff(r.msd[n], expected[n] / runs), 1e-14);
}

TEST(MonteCarlo, DivergedRunsAreCounted) {
  NetworkConfig cfg = simple_network(1, 8, 1.0);
  const McResult r = run_monte_carlo(cfg, {4, 300, 1, 2, false});
  EXPECT_EQ(r.diverged_runs, 4);
  EXPECT_TRUE(r.diverged());
  EXPECT_EQ(r.mean_deviation.size(), 0);
}

TEST(MonteCarlo, WorkersFromEnvironment) {
  ::setenv(kWorkersEnv, "3", 1);
  EXPECT_EQ(resolve_workers(0), 3);
  EXPECT_EQ(resolve_workers(5), 5);
  ::unsetenv(kWorkersEnv);
  EXPECT_GE(resolve_workers(0), 1);
}
