#include "fcdiff/experiment.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fcdiff/config_io.hpp"

namespace fcdiff {

namespace {

double to_db(double v) { return 10.0 * std::log10(v); }

double gap_db(double mc, double theory) { return std::abs(to_db(mc / theory)); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

long steady_state_window(const NetworkConfig& cfg, long horizon) {
  const long cap = std::max(1L, horizon / 4);
  const auto lcm = cfg.power_period_lcm();
  return std::max(1L, lcm ? std::min(*lcm, cap) : cap);
}

long burn_in_index(std::span<const double> theory, long window) {
  const long len = static_cast<long>(theory.size());
  if (len == 0) return 0;
  window = std::clamp(window, 1L, len);
  double level = 0.0;
  for (long n = len - window; n < len; ++n) level += theory[n];
  level /= static_cast<double>(window);
  for (long n = 0; n < len; ++n)
    if (std::isfinite(theory[n]) && theory[n] > 0.0 && std::abs(to_db(theory[n] / level)) <= 3.0) return n;
  return len - 1;
}

std::optional<long> detect_ripple_period(std::span<const double> series) {
  const long len = static_cast<long>(series.size());
  if (len < 8 || !all_finite(series)) return std::nullopt;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(len);
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= static_cast<double>(len);
  if (!(var > 0.0)) return std::nullopt;

  // mean squared difference at each lag over 2 var: 0 at an exact period,
  // about 1 for unrelated samples
  const long max_lag = len / 2;
  std::vector<double> d(max_lag + 1, 0.0);
  for (long lag = 1; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (long t = 0; t + lag < len; ++t) {
      const double diff = series[t] - series[t + lag];
      acc += diff * diff;
    }
    d[lag] = acc / (2.0 * var * static_cast<double>(len - lag));
  }

  long first_far = -1;
  for (long lag = 1; lag <= max_lag; ++lag)
    if (d[lag] > 1.0) {
      first_far = lag;
      break;
    }
  if (first_far < 0) return std::nullopt;

  double lowest = INFINITY;
  for (long lag = first_far; lag <= max_lag; ++lag) lowest = std::min(lowest, d[lag]);
  if (lowest > 0.5) return std::nullopt;
  const double level = lowest + 0.1 * (1.0 - lowest);
  long lag = first_far;
  while (d[lag] > level) ++lag;
  long best = lag;
  for (; lag <= max_lag && d[lag] <= level; ++lag)
    if (d[lag] < d[best]) best = lag;
  return best;
}

ComparisonReport compare_curves(const NetworkConfig& cfg, std::span<const double> theory, std::span<const double> mc) {
  ComparisonReport rep;
  const long len = static_cast<long>(std::min(theory.size(), mc.size()));
  const long horizon = len - 1;
  rep.window = steady_state_window(cfg, horizon);
  rep.diverged = !all_finite(theory.first(len)) || !all_finite(mc.first(len));
  if (rep.diverged) {
    rep.steady_state_gap_db = std::numeric_limits<double>::infinity();
    rep.max_transient_gap_db = std::numeric_limits<double>::infinity();
    rep.burn_in = horizon;
    return rep;
  }
  rep.burn_in = burn_in_index(theory.first(len), rep.window);

  double ss = 0.0;
  double theory_level = 0.0;
  double mc_level = 0.0;
  for (long n = len - rep.window; n < len; ++n) {
    ss += gap_db(mc[n], theory[n]);
    theory_level += theory[n];
    mc_level += mc[n];
  }
  const double w = static_cast<double>(rep.window);
  rep.steady_state_gap_db = ss / w;
  rep.theory_steady_db = to_db(theory_level / w);
  rep.mc_steady_db = to_db(mc_level / w);

  double worst = 0.0;
  for (long n = rep.burn_in; n < len; ++n) worst = std::max(worst, gap_db(mc[n], theory[n]));
  rep.max_transient_gap_db = worst;
  rep.ripple_period_detected = detect_ripple_period(mc.subspan(rep.burn_in, len - rep.burn_in));
  return rep;
}

std::vector<double> mean_deviation_norms(const McResult& mc) {
  std::vector<double> out(mc.mean_deviation.cols());
  for (Eigen::Index n = 0; n < mc.mean_deviation.cols(); ++n) out[n] = mc.mean_deviation.col(n).norm();
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int workers) {
  spec.validate();
  ExperimentResult res;
  McOptions opts;
  opts.runs = spec.runs;
  opts.horizon = spec.horizon;
  opts.master_seed = spec.master_seed;
  opts.workers = workers;
  opts.track_mean = true;
  res.mc = run_monte_carlo(spec.network, opts);

  const TheoryModel primary = spec.theory_model == TheoryModel::Slow ? TheoryModel::Slow : TheoryModel::General;
  res.theory = run_theory(spec.network, spec.horizon, primary);
  if (spec.theory_model == TheoryModel::Both) res.theory_slow = run_theory(spec.network, spec.horizon, TheoryModel::Slow);
  res.report = compare_curves(spec.network, res.theory.msd, res.mc.msd);
  res.report.diverged = res.report.diverged || res.mc.diverged() || res.theory.diverged;
  return res;
}

void write_learning_curve_csv(std::ostream& os, std::span<const double> theory, std::span<const double> mc,
                              std::span<const double> mean_dev_norm) {
  const std::size_t len = std::max({theory.size(), mc.size(), mean_dev_norm.size()});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto at = [nan](std::span<const double> v, std::size_t n) { return n < v.size() ? v[n] : nan; };
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "n,msd_theory,msd_mc,msd_theory_db,msd_mc_db,mean_dev_norm\n");
  for (std::size_t n = 0; n < len; ++n) {
    const double t = at(theory, n);
    const double m = at(mc, n);
    fmt::format_to(std::back_inserter(buf), "{},{:.10e},{:.10e},{:.6f},{:.6f},{:.10e}\n", n, t, m, to_db(t), to_db(m),
                   at(mean_dev_norm, n));
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void write_report_json(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& result) {
  const auto& r = result.report;
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  j["algorithm"] = to_string(spec.network.algorithm);
  j["strategy"] = to_string(spec.network.strategy);
  j["runs"] = spec.runs;
  j["horizon"] = spec.horizon;
  j["seed"] = spec.master_seed;
  j["theory_model"] = to_string(spec.theory_model);
  j["steady_state_gap_db"] = r.steady_state_gap_db;
  j["max_transient_gap_db"] = r.max_transient_gap_db;
  j["diverged"] = r.diverged;
  j["burn_in"] = r.burn_in;
  j["window"] = r.window;
  j["theory_steady_db"] = r.theory_steady_db;
  j["mc_steady_db"] = r.mc_steady_db;
  j["ripple_period_detected"] = r.ripple_period_detected ? nlohmann::ordered_json(*r.ripple_period_detected) : nullptr;
  j["diverged_runs"] = result.mc.diverged_runs;
  j["skipped_updates"] = result.mc.skipped_updates;
  j["warnings"] = result.theory.warnings;
  os << j.dump(2) << "\n";
}

double wss_transient_factor(const NetworkConfig& cfg) {
  NetworkConfig wss = cfg;
  for (auto& node : wss.nodes) node.profile = PowerProfile(Constant{node.profile.mean_power()});
  return slow_msd_coefficients(wss, 0).transient;
}

std::vector<StabilityRow> compare_stability(const ExperimentSpec& spec, std::span<const double> multipliers,
                                            long mc_runs, int workers) {
  spec.validate();
  std::vector<StabilityRow> rows;
  const double big_n = static_cast<double>(spec.network.taps());
  for (double m : multipliers) {
    NetworkConfig cfg = spec.network;
    StabilityRow row;
    row.multiplier = m;
    row.steps.resize(cfg.node_count());
    for (long j = 0; j < cfg.node_count(); ++j) {
      auto& node = cfg.nodes[j];
      const double psi = node.dist.kurtosis();
      node.step = cfg.algorithm == Algorithm::Dlms ? 2.0 * m / (node.profile.mean_power() * (big_n + psi - 1.0))
                                                   : 2.0 * m * big_n / (big_n + psi - 1.0);
      row.steps[j] = node.step;
    }
    row.predicted_stable = m == 0.0 || wss_transient_factor(cfg) < 1.0;
    row.theory_diverged = run_theory(cfg, spec.horizon, TheoryModel::General).diverged;
    if (mc_runs > 0) {
      McOptions opts;
      opts.runs = mc_runs;
      opts.horizon = spec.horizon;
      opts.master_seed = spec.master_seed;
      opts.workers = workers;
      opts.track_mean = false;
      row.mc_diverged = run_monte_carlo(cfg, opts).diverged();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fcdiff
