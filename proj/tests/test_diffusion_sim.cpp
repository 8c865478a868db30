#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fcdiff/diffusion_sim.hpp"
#include "support.hpp"

using namespace fcdiff;
using fcdiff::testing::random_network;
using fcdiff::testing::rel_diff;
using fcdiff::testing::simple_network;

namespace {

double max_rel_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (Eigen::Index n = 0; n < a.cols(); ++n) {
    const double scale = std::max(a.col(n).norm(), b.col(n).norm());
    if (scale > 0.0) worst = std::max(worst, (a.col(n) - b.col(n)).norm() / scale);
  }
  return worst;
}

}  // namespace

TEST(DiffusionSim, ZeroStepFreezesDeviation) {
  for (auto strategy : {Strategy::Cta, Strategy::Atc})
    for (auto alg : {Algorithm::Dlms, Algorithm::Dnlms}) {
      NetworkConfig cfg = simple_network(3, 6, 0.0, alg);
      cfg.strategy = strategy;
      cfg.plant.sigma_q2 = 0.0;
      const RunTrace t = trace_run(cfg, 9, 0, 40);
      for (long n = 0; n <= 40; ++n) EXPECT_EQ(t.deviation.col(n), -cfg.plant.h0);
    }
}

TEST(DiffusionSim, NodeWeightsEqualCombinationAfterFrozenStep) {
  NetworkConfig cfg = simple_network(4, 5, 0.0);
  cfg.plant.sigma_q2 = 0.0;
  RunStreams streams(cfg, 1, 0);
  McRunState s = init_run_state(cfg, streams);
  s.node_weights.setRandom();
  const Eigen::VectorXd theta = s.node_weights * cfg.weights();
  cta_dlms_step(s, cfg, 0, streams);
  for (long j = 0; j < 4; ++j) EXPECT_LT((s.node_weights.col(j) - theta).norm(), 1e-15);
}

// Single node, c = 1: the network is plain LMS. The oracle regenerates the
// same input, noise and plant streams and runs a textbook LMS loop.
TEST(DiffusionSim, SingleNodeIsPlainLms) {
  for (auto alg : {Algorithm::Dlms, Algorithm::Dnlms}) {
    NetworkConfig cfg = simple_network(1, 8, alg == Algorithm::Dlms ? 0.05 : 0.4, alg, InputDistribution::uniform());
    cfg.nodes[0].profile = PowerProfile::sinusoid_with_period(1.0, 64);
    const long horizon = 300, taps = 8;
    const std::uint64_t seed = 77, run = 3;

    const auto s = sample(cfg.nodes[0].dist, {seed, run, 0, StreamRole::Input}, horizon + taps);
    auto x = [&](long t) { return std::sqrt(cfg.nodes[0].profile.at(t)) * s[t + taps - 1]; };
    RngStream noise({seed, run, 0, StreamRole::Noise});
    const Eigen::MatrixXd h = make_plant(cfg.plant, {seed, run, 0, StreamRole::Plant}, horizon);

    Eigen::VectorXd w = Eigen::VectorXd::Zero(taps);
    Eigen::MatrixXd expected(taps, horizon + 1);
    for (long n = 0; n <= horizon; ++n) {
      expected.col(n) = w - h.col(n);
      Eigen::VectorXd xv(taps);
      for (long k = 0; k < taps; ++k) xv[k] = x(n - k);
      const double d = xv.dot(h.col(n)) + std::sqrt(cfg.nodes[0].noise_power) * noise.normal();
      const double e = d - xv.dot(w);
      const double gain = alg == Algorithm::Dlms ? cfg.nodes[0].step : cfg.nodes[0].step / xv.squaredNorm();
      w += gain * e * xv;
    }
    const RunTrace t = trace_run(cfg, seed, run, horizon);
    EXPECT_LT(max_rel_gap(t.deviation, expected), 1e-12) << to_string(alg);
  }
}

TEST(DiffusionSim, CtaAtcEquivalenceRandomConfigs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    NetworkConfig cfg = random_network(rng, trial % 2 ? Algorithm::Dnlms : Algorithm::Dlms);
    cfg.strategy = Strategy::Cta;
    const RunTrace cta = trace_run(cfg, 1000 + trial, trial, 400);
    cfg.strategy = Strategy::Atc;
    const RunTrace atc = trace_run(cfg, 1000 + trial, trial, 400);
    EXPECT_LE(max_rel_gap(cta.deviation, atc.deviation), 1e-12) << "trial " << trial;
  }
}

TEST(DiffusionSim, WeightScalingInvariance) {
  std::mt19937_64 rng(5);
  NetworkConfig cfg = random_network(rng, Algorithm::Dlms);
  NetworkConfig scaled = cfg;
  for (auto& node : scaled.nodes) node.weight *= 3.7;
  normalize_weights(scaled);
  const RunTrace a = trace_run(cfg, 3, 0, 300);
  const RunTrace b = trace_run(scaled, 3, 0, 300);
  EXPECT_LE(max_rel_gap(a.deviation, b.deviation), 1e-12);
}

TEST(DiffusionSim, NoiselessStationaryConvergence) {
  for (auto alg : {Algorithm::Dlms, Algorithm::Dnlms}) {
    const long m = 4, taps = 16;
    const double psi = 3.0;
    // half the stability bound 2/(1 + sum c^2 (psi + N - 2)), times N for NLMS
    const double lambda = 1.0 / (1.0 + (psi + taps - 2.0) / m);
    NetworkConfig cfg = simple_network(m, taps, alg == Algorithm::Dlms ? lambda : taps * lambda, alg);
    cfg.plant.sigma_q2 = 0.0;
    for (auto& node : cfg.nodes) node.noise_power = 0.0;
    const RunTrace t = trace_run(cfg, 4, 0, 2000);
    EXPECT_LT(t.msd.back(), 1e-3 * t.msd.front()) << to_string(alg);
  }
}

TEST(DiffusionSim, DegenerateNlmsUpdatesAreSkipped) {
  // N = 1 and a sinusoid with a zero every 4th sample: X^T X = 0 at n = 3 mod 4
  NetworkConfig cfg = simple_network(1, 1, 0.5, Algorithm::Dnlms);
  cfg.nodes[0].profile = PowerProfile(Sinusoidal{1.0, std::numbers::pi / 2});
  cfg.plant.h0 = Eigen::VectorXd::Ones(1);
  const long horizon = 100;
  const RunTrace t = trace_run(cfg, 1, 0, horizon);
  long zeros = 0;
  for (long n = 0; n < horizon; ++n) zeros += cfg.nodes[0].profile.at(n) == 0.0;
  EXPECT_GT(zeros, 0);
  EXPECT_EQ(t.outcome.skipped_updates, zeros);
  EXPECT_FALSE(t.outcome.diverged);
  for (double v : t.msd) EXPECT_TRUE(std::isfinite(v));
}

TEST(DiffusionSim, DivergenceGuardStopsRun) {
  NetworkConfig cfg = simple_network(1, 8, 1.0);
  const RunTrace t = trace_run(cfg, 1, 0, 500);
  ASSERT_TRUE(t.outcome.diverged);
  EXPECT_GT(t.outcome.stopped_at, 0);
  for (long n = t.outcome.stopped_at; n <= 500; ++n) EXPECT_TRUE(std::isinf(t.msd[n]));
  for (long n = 0; n < t.outcome.stopped_at; ++n) EXPECT_LE(t.msd[n], kDivergenceFactor * t.msd[0]);
}

TEST(DiffusionSim, MsdIsDeviationNorm) {
  std::mt19937_64 rng(8);
  const NetworkConfig cfg = random_network(rng, Algorithm::Dnlms);
  const RunTrace t = trace_run(cfg, 2, 1, 100);
  for (long n = 0; n <= 100; ++n) EXPECT_LE(rel_diff(t.msd[n], t.deviation.col(n).squaredNorm()), 1e-15);
  EXPECT_EQ(t.deviation.col(0), -cfg.plant.h0);
}
