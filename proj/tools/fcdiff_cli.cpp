// fcdiff: command-line front end for the simulator, theory models and
// design formulas. Exit codes: 0 ok, 1 config/usage error, 2 gap exceeded.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fcdiff/builtins.hpp"
#include "fcdiff/config_io.hpp"
#include "fcdiff/design_tools.hpp"
#include "fcdiff/experiment.hpp"

namespace {

using namespace fcdiff;

constexpr int kExitConfig = 1;
constexpr int kExitGap = 2;

struct RunFlags {
  std::string spec;
  std::optional<long> runs;
  std::optional<long> horizon;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 0;
  std::string format = "csv";
  std::optional<double> assert_gap;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("spec", f.spec, "builtin name or YAML file")->required();
  cmd->add_option("--runs", f.runs, "Monte Carlo runs")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", f.horizon, "samples")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output path prefix");
  cmd->add_option("--workers", f.workers, "worker threads (0: $FCDIFF_WORKERS or OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv"}));
}

ExperimentSpec prepare(const RunFlags& f) {
  ExperimentSpec spec = resolve_spec(f.spec);
  if (f.runs) spec.runs = *f.runs;
  if (f.horizon) spec.horizon = *f.horizon;
  if (f.seed) spec.master_seed = *f.seed;
  if (!f.out.empty()) spec.output = f.out;
  if (spec.output.empty()) spec.output = spec.name;
  spec.validate();
  return spec;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

void print_warnings(const TheoryTrajectory& t) {
  for (const auto& w : t.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_simulate(const RunFlags& f) {
  const ExperimentSpec spec = prepare(f);
  McOptions opts{spec.runs, spec.horizon, spec.master_seed, f.workers, true};
  const McResult mc = run_monte_carlo(spec.network, opts);
  const std::string path = spec.output + ".csv";
  auto os = open_out(path);
  const auto norms = mean_deviation_norms(mc);
  write_learning_curve_csv(os, {}, mc.msd, norms);
  fmt::print("{}: {} runs, horizon {}, diverged runs {}, skipped updates {} -> {}\n", spec.name, mc.runs, mc.horizon,
             mc.diverged_runs, mc.skipped_updates, path);
  return 0;
}

int cmd_theory(const RunFlags& f) {
  const ExperimentSpec spec = prepare(f);
  auto emit = [&](TheoryModel model, const std::string& path) {
    const TheoryTrajectory t = run_theory(spec.network, spec.horizon, model);
    print_warnings(t);
    auto os = open_out(path);
    write_learning_curve_csv(os, t.msd, {}, t.mean_dev_norm);
    fmt::print("{}: {} model{} -> {}\n", spec.name, to_string(model), t.diverged ? " (diverged)" : "", path);
  };
  if (spec.theory_model == TheoryModel::Slow) {
    emit(TheoryModel::Slow, spec.output + ".csv");
  } else {
    emit(TheoryModel::General, spec.output + ".csv");
    if (spec.theory_model == TheoryModel::Both) emit(TheoryModel::Slow, spec.output + "_slow.csv");
  }
  return 0;
}

int cmd_experiment(const RunFlags& f) {
  const ExperimentSpec spec = prepare(f);
  const ExperimentResult res = run_experiment(spec, f.workers);
  print_warnings(res.theory);
  {
    auto os = open_out(spec.output + ".csv");
    write_learning_curve_csv(os, res.theory.msd, res.mc.msd, mean_deviation_norms(res.mc));
  }
  if (res.theory_slow) {
    auto os = open_out(spec.output + "_slow.csv");
    write_learning_curve_csv(os, res.theory_slow->msd, res.mc.msd, mean_deviation_norms(res.mc));
  }
  {
    auto os = open_out(spec.output + "_report.json");
    write_report_json(os, spec, res);
  }
  const auto& r = res.report;
  fmt::print("{}: steady-state gap {:.3f} dB, max transient gap {:.3f} dB, theory {:.2f} dB, mc {:.2f} dB{}\n",
             spec.name, r.steady_state_gap_db, r.max_transient_gap_db, r.theory_steady_db, r.mc_steady_db,
             r.diverged ? ", DIVERGED" : "");
  if (f.assert_gap && (r.diverged || !(r.steady_state_gap_db <= *f.assert_gap))) {
    fmt::print(stderr, "steady-state gap {:.3f} dB exceeds {:.3f} dB\n", r.steady_state_gap_db, *f.assert_gap);
    return kExitGap;
  }
  return 0;
}

struct StabilityFlags {
  RunFlags run;
  std::vector<double> multipliers{0.5, 1.0, 2.0, 4.0};
  long mc_runs = 0;
};

int cmd_stability(const StabilityFlags& f) {
  const ExperimentSpec spec = prepare(f.run);
  const auto rows = compare_stability(spec, f.multipliers, f.mc_runs, f.run.workers);
  fmt::print("multiplier,predicted_stable,theory_diverged,mc_diverged\n");
  for (const auto& row : rows)
    fmt::print("{},{},{},{}\n", row.multiplier, row.predicted_stable, row.theory_diverged,
               row.mc_diverged ? (*row.mc_diverged ? "true" : "false") : "");
  return 0;
}

struct DesignFlags {
  long nodes = 1;
  long taps = 1;
  std::vector<double> kurtosis;
  std::vector<double> weights;
  std::vector<double> snr;
  bool uniform_weights = false;
  bool optimal_weights = false;
  std::string algorithm = "dlms";
  std::string criterion = "snr";
  double sigma_q2 = 0.0;
  std::optional<double> step;
};

Eigen::VectorXd per_node(const std::vector<double>& v, long nodes, const std::string& flag) {
  if (v.size() == 1) return Eigen::VectorXd::Constant(nodes, v[0]);
  if (static_cast<long>(v.size()) != nodes)
    throw std::invalid_argument(fmt::format("{} needs 1 or {} values, got {}", flag, nodes, v.size()));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), nodes);
}

DesignInput design_input(const DesignFlags& f) {
  DesignInput d;
  d.nodes = f.nodes;
  d.taps = f.taps;
  d.kurtoses = f.kurtosis.empty() ? Eigen::VectorXd::Constant(f.nodes, 3.0) : per_node(f.kurtosis, f.nodes, "--kurtosis");
  d.snrs = f.snr.empty() ? Eigen::VectorXd::Ones(f.nodes) : per_node(f.snr, f.nodes, "--snr");
  if (!f.weights.empty() && !f.uniform_weights) d.weights = per_node(f.weights, f.nodes, "--weights");
  d.sigma_q2 = f.sigma_q2;
  d.validate();
  return d;
}

std::string join(const Eigen::VectorXd& v) {
  return fmt::format("{:.6f}", fmt::join(v.data(), v.data() + v.size(), ","));
}

int cmd_design_bounds(const DesignFlags& f) {
  const DesignInput d = design_input(f);
  double bound = 0.0;
  if (f.algorithm == "dlms")
    bound = dlms_stability_bound(d);
  else
    bound = f.optimal_weights ? dnlms_stability_bound_optimal(d) : dnlms_stability_bound(d);
  fmt::print("{:.4f}\n", bound);
  return 0;
}

int cmd_design_weights(const DesignFlags& f) {
  const DesignInput d = design_input(f);
  if (f.criterion == "speed") {
    const SpeedWeights w = optimal_weights_speed(d);
    fmt::print("weights {}\nmin_spread {:.6g}\n", join(w.weights), w.min_spread);
    return 0;
  }
  const SnrWeights w = optimal_weights_snr(d);
  fmt::print("weights {}\nmin_noise_term {:.6g}\n", join(w.weights), w.min_noise_term);
  if (f.step) {
    const double msd =
        f.algorithm == "dlms" ? min_steady_state_msd_dlms(d, *f.step) : min_steady_state_msd_dnlms(d, *f.step);
    fmt::print("min_steady_state_msd {:.6g}\n", msd);
  }
  return 0;
}

void add_design_flags(CLI::App* cmd, DesignFlags& f) {
  cmd->add_option("--M", f.nodes, "nodes")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--N", f.taps, "taps")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--kurtosis", f.kurtosis, "one value or one per node")->delimiter(',');
  cmd->add_option("--snr", f.snr, "one value or one per node")->delimiter(',');
  cmd->add_option("--algorithm", f.algorithm)->check(CLI::IsMember({"dlms", "dnlms"}));
  cmd->add_option("--sigma-q2", f.sigma_q2, "plant random-walk variance")->check(CLI::NonNegativeNumber);
  auto* w = cmd->add_option("--weights", f.weights, "combiner weights, one per node")->delimiter(',');
  cmd->add_flag("--uniform-weights", f.uniform_weights, "c_j = 1/M")->excludes(w);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fusion-center diffusion LMS/NLMS: simulation, theory, design"};
  app.require_subcommand(1);

  RunFlags sim, theory, exp;
  add_run_flags(app.add_subcommand("simulate", "Monte Carlo learning curve"), sim);
  add_run_flags(app.add_subcommand("theory", "theoretical learning curve"), theory);
  auto* exp_cmd = app.add_subcommand("experiment", "theory and Monte Carlo with a comparison report");
  add_run_flags(exp_cmd, exp);
  exp_cmd->add_option("--assert-gap", exp.assert_gap, "exit 2 when the steady-state gap (dB) exceeds this");

  StabilityFlags stab;
  auto* stab_cmd = app.add_subcommand("stability", "scan step multipliers of the isolated-node bound");
  add_run_flags(stab_cmd, stab.run);
  stab_cmd->add_option("--multipliers", stab.multipliers)->delimiter(',');
  stab_cmd->add_option("--mc-runs", stab.mc_runs)->check(CLI::NonNegativeNumber);

  auto* design = app.add_subcommand("design", "closed-form stability bounds and optimal weights");
  design->require_subcommand(1);
  DesignFlags bounds_flags, weights_flags;
  auto* bounds_cmd = design->add_subcommand("bounds", "step-size stability bound");
  add_design_flags(bounds_cmd, bounds_flags);
  bounds_cmd->add_flag("--optimal-weights", bounds_flags.optimal_weights, "NLMS bound at speed-optimal weights");
  auto* weights_cmd = design->add_subcommand("weights", "optimal combiner weights");
  add_design_flags(weights_cmd, weights_flags);
  weights_cmd->add_option("--criterion", weights_flags.criterion)->check(CLI::IsMember({"snr", "speed"}));
  weights_cmd->add_option("--step", weights_flags.step, "lambda (LMS) or xi (NLMS) for the minimum MSD");

  auto* list_cmd = app.add_subcommand("list-builtins", "names of the built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(sim);
    if (app.got_subcommand("theory")) return cmd_theory(theory);
    if (app.got_subcommand("experiment")) return cmd_experiment(exp);
    if (app.got_subcommand("stability")) return cmd_stability(stab);
    if (list_cmd->parsed()) {
      for (const auto& n : builtin_names()) fmt::print("{}\n", n);
      return 0;
    }
    if (bounds_cmd->parsed()) return cmd_design_bounds(bounds_flags);
    if (weights_cmd->parsed()) return cmd_design_weights(weights_flags);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
