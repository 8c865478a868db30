#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fcdiff/builtins.hpp"
#include "fcdiff/experiment.hpp"
#include "support.hpp"

using namespace fcdiff;
using fcdiff::testing::simple_network;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.name = "small";
  spec.network = simple_network(3, 8, 0.03);
  for (std::size_t j = 0; j < 3; ++j)
    spec.network.nodes[j].profile = PowerProfile::sinusoid_with_period(1.0, std::ldexp(1.0, static_cast<int>(j + 4)));
  spec.runs = 12;
  spec.horizon = 600;
  return spec;
}

}  // namespace

TEST(Experiment, SteadyStateWindow) {
  ExperimentSpec s = small_spec();
  EXPECT_EQ(steady_state_window(s.network, 600), 64);
  EXPECT_EQ(steady_state_window(s.network, 200), 50);
  s.network.nodes[0].profile = PowerProfile(Sinusoidal{1.0, 1.0});
  EXPECT_EQ(steady_state_window(s.network, 600), 150);
}

TEST(Experiment, BurnInWithinThreeDb) {
  std::vector<double> curve(200);
  for (int n = 0; n < 200; ++n) curve[n] = 1.0 + 100.0 * std::exp(-0.1 * n);
  const long b = burn_in_index(curve, 50);
  EXPECT_LE(10 * std::log10(curve[b] / 1.0), 3.0 + 1e-3);
  EXPECT_GT(10 * std::log10(curve[b - 1] / 1.0), 3.0 - 1e-3);
}

TEST(Experiment, RippleDetection) {
  for (long period : {16L, 100L, 1024L}) {
    std::vector<double> v(5 * period);
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = 2.0 + std::sin(2.0 * std::numbers::pi * n / period);
    const auto p = detect_ripple_period(v);
    ASSERT_TRUE(p) << period;
    EXPECT_LE(std::abs(*p - period), 1) << period;
  }
  std::vector<double> flat(500, 1.0);
  EXPECT_FALSE(detect_ripple_period(flat));
  std::vector<double> ramp(500);
  for (int n = 0; n < 500; ++n) ramp[n] = n;
  EXPECT_FALSE(detect_ripple_period(ramp));
}

TEST(Experiment, CompareIdenticalCurves) {
  const ExperimentSpec s = small_spec();
  const auto t = run_theory(s.network, s.horizon, TheoryModel::General);
  const ComparisonReport r = compare_curves(s.network, t.msd, t.msd);
  EXPECT_EQ(r.steady_state_gap_db, 0.0);
  EXPECT_EQ(r.max_transient_gap_db, 0.0);
  EXPECT_FALSE(r.diverged);

  std::vector<double> doubled = t.msd;
  for (double& v : doubled) v *= 2.0;
  const ComparisonReport g = compare_curves(s.network, t.msd, doubled);
  EXPECT_NEAR(g.steady_state_gap_db, 10 * std::log10(2.0), 1e-12);
  EXPECT_NEAR(g.max_transient_gap_db, 10 * std::log10(2.0), 1e-12);
}

TEST(Experiment, RunAgreesAndIsDeterministic) {
  const ExperimentSpec s = small_spec();
  const ExperimentResult a = run_experiment(s, 1);
  const ExperimentResult b = run_experiment(s, 3);
  EXPECT_FALSE(a.report.diverged);
  EXPECT_LT(a.report.steady_state_gap_db, 1.5);
  EXPECT_GE(a.report.max_transient_gap_db, 0.0);
  std::ostringstream ca, cb;
  write_learning_curve_csv(ca, a.theory.msd, a.mc.msd, mean_deviation_norms(a.mc));
  write_learning_curve_csv(cb, b.theory.msd, b.mc.msd, mean_deviation_norms(b.mc));
  EXPECT_EQ(ca.str(), cb.str());
}

TEST(Experiment, CsvSchema) {
  const std::vector<double> theory = {1.0, 0.1};
  std::ostringstream os;
  write_learning_curve_csv(os, theory, {}, {});
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,msd_theory,msd_mc,msd_theory_db,msd_mc_db,mean_dev_norm");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1.0000000000e+00,nan,0.000000,nan,nan");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 2), "1,");
  EXPECT_NE(line.find("-10.000000"), std::string::npos);
  EXPECT_FALSE(std::getline(in, line));
}

TEST(Experiment, ReportJson) {
  const ExperimentSpec s = small_spec();
  const ExperimentResult r = run_experiment(s, 1);
  std::ostringstream os;
  write_report_json(os, s, r);
  EXPECT_NE(os.str().find("\"steady_state_gap_db\""), std::string::npos);
  EXPECT_NE(os.str().find("\"ripple_period_detected\""), std::string::npos);
}

TEST(Experiment, DivergingSpecIsReportedNotThrown) {
  ExperimentSpec s = small_spec();
  for (auto& node : s.network.nodes) node.step = 2.0;
  s.runs = 3;
  const ExperimentResult r = run_experiment(s, 1);
  EXPECT_TRUE(r.report.diverged);
  EXPECT_TRUE(r.theory.diverged);
  EXPECT_TRUE(r.mc.diverged());
  std::ostringstream os;
  EXPECT_NO_THROW(write_learning_curve_csv(os, r.theory.msd, r.mc.msd, mean_deviation_norms(r.mc)));
}

TEST(Stability, NetworkToleratesLargeMultipliers) {
  ExperimentSpec s = *builtin_spec("fig3a");
  s.horizon = 3000;
  const double mults[] = {0.5, 2.0, 4.0};
  for (const auto& row : compare_stability(s, mults)) {
    EXPECT_TRUE(row.predicted_stable) << row.multiplier;
    EXPECT_FALSE(row.theory_diverged) << row.multiplier;
  }
}

TEST(Stability, SingleNodeDivergesAtTwiceBound) {
  ExperimentSpec s;
  s.name = "single";
  s.network = simple_network(1, 32, 0.0, Algorithm::Dlms, InputDistribution::uniform());
  s.horizon = 5000;
  const double mults[] = {0.5, 2.0};
  const auto rows = compare_stability(s, mults, 4, 1);
  EXPECT_TRUE(rows[0].predicted_stable);
  EXPECT_FALSE(rows[0].theory_diverged);
  EXPECT_FALSE(*rows[0].mc_diverged);
  EXPECT_FALSE(rows[1].predicted_stable);
  EXPECT_TRUE(rows[1].theory_diverged);
  EXPECT_TRUE(*rows[1].mc_diverged);
}

TEST(Stability, ZeroMultiplierGrowsLinearly) {
  ExperimentSpec s = *builtin_spec("fig3a");
  s.horizon = 100;
  const double mults[] = {0.0};
  const auto rows = compare_stability(s, mults);
  EXPECT_TRUE(rows[0].predicted_stable);
  EXPECT_FALSE(rows[0].theory_diverged);
  NetworkConfig cfg = s.network;
  for (auto& node : cfg.nodes) node.step = 0.0;
  const auto t = run_theory(cfg, 100, TheoryModel::General);
  for (long n = 0; n < 100; ++n) EXPECT_NEAR(t.msd[n + 1] - t.msd[n], 32 * cfg.plant.sigma_q2, 1e-15);
}
