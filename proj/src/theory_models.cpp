#include "fcdiff/theory_models.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace fcdiff {

TheoryState initial_theory_state(const NetworkConfig& cfg) {
  TheoryState s;
  s.k_diag = cfg.plant.h0.array().square();
  s.mean_dev = -cfg.plant.h0;
  s.n = 0;
  return s;
}

Eigen::MatrixXd lagged_powers(const NetworkConfig& cfg, long n) {
  const long taps = cfg.taps();
  Eigen::MatrixXd p(taps, cfg.node_count());
  for (long j = 0; j < cfg.node_count(); ++j)
    for (long k = 0; k < taps; ++k) p(k, j) = cfg.nodes[j].profile.at(n - k);
  return p;
}

double window_mean_power(const PowerProfile& profile, long n, long taps) {
  double sum = 0.0;
  for (long k = 0; k < taps; ++k) sum += profile.at(n - k);
  return sum / static_cast<double>(taps);
}

Eigen::VectorXd dnlms_equivalent_steps(const NetworkConfig& cfg, long n) {
  const double taps = static_cast<double>(cfg.taps());
  Eigen::VectorXd mu(cfg.node_count());
  for (long j = 0; j < cfg.node_count(); ++j) {
    const double avg = window_mean_power(cfg.nodes[j].profile, n, cfg.taps());
    mu[j] = avg > 0.0 ? cfg.nodes[j].step / (taps * avg) : 0.0;
  }
  return mu;
}

TheoryCoefficients dlms_coefficients(const NetworkConfig& cfg, long n, const Eigen::VectorXd& steps) {
  const long taps = cfg.taps();
  const long m = cfg.node_count();
  const Eigen::MatrixXd p = lagged_powers(cfg, n);
  TheoryCoefficients co{Eigen::VectorXd::Zero(taps), Eigen::MatrixXd::Zero(taps, taps), Eigen::VectorXd::Zero(taps)};
  for (long i = 0; i < taps; ++i) {
    double alpha = 0.0;
    double gamma = cfg.plant.sigma_q2;
    for (long j = 0; j < m; ++j) {
      const double cj = cfg.nodes[j].weight;
      const double cmu = cj * steps[j];
      alpha += 2.0 * cmu * p(i, j);
      alpha -= cmu * cmu * cfg.nodes[j].dist.kurtosis() * p(i, j) * p(i, j);
      for (long k = 0; k < m; ++k) {
        if (k == j) continue;
        alpha -= cmu * cfg.nodes[k].weight * steps[k] * p(i, j) * p(i, k);
      }
      gamma += cmu * cmu * cfg.nodes[j].noise_power * p(i, j);
    }
    co.alpha[i] = alpha;
    co.gamma[i] = gamma;
    for (long r = 0; r < taps; ++r) {
      if (r == i) continue;
      double beta = 0.0;
      for (long j = 0; j < m; ++j) {
        const double cmu = cfg.nodes[j].weight * steps[j];
        beta += cmu * cmu * p(i, j) * p(r, j);
      }
      co.beta(i, r) = beta;
    }
  }
  return co;
}

TheoryCoefficients dlms_coefficients(const NetworkConfig& cfg, long n) {
  return dlms_coefficients(cfg, n, cfg.steps());
}

TheoryCoefficients dnlms_coefficients(const NetworkConfig& cfg, long n) {
  const long taps = cfg.taps();
  const long m = cfg.node_count();
  const double big_n = static_cast<double>(taps);
  const Eigen::MatrixXd p = lagged_powers(cfg, n);
  Eigen::VectorXd avg(m);
  for (long j = 0; j < m; ++j) avg[j] = window_mean_power(cfg.nodes[j].profile, n, taps);

  // xi_j / (N * avg_j), zero for a node with no power in its window
  auto normalized = [&](long j) { return avg[j] > 0.0 ? cfg.nodes[j].step / (big_n * avg[j]) : 0.0; };

  TheoryCoefficients co{Eigen::VectorXd::Zero(taps), Eigen::MatrixXd::Zero(taps, taps), Eigen::VectorXd::Zero(taps)};
  for (long i = 0; i < taps; ++i) {
    double alpha = 0.0;
    double gamma = cfg.plant.sigma_q2;
    for (long j = 0; j < m; ++j) {
      const double cj = cfg.nodes[j].weight;
      const double gj = normalized(j);
      alpha += 2.0 * cj * gj * p(i, j);
      alpha -= cj * cj * gj * gj * cfg.nodes[j].dist.kurtosis() * p(i, j) * p(i, j);
      for (long k = 0; k < m; ++k) {
        if (k == j) continue;
        alpha -= cj * cfg.nodes[k].weight * gj * normalized(k) * p(i, j) * p(i, k);
      }
      gamma += cj * cj * gj * gj * cfg.nodes[j].noise_power * p(i, j);
    }
    co.alpha[i] = alpha;
    co.gamma[i] = gamma;
    for (long r = 0; r < taps; ++r) {
      if (r == i) continue;
      double beta = 0.0;
      for (long j = 0; j < m; ++j) {
        const double cj = cfg.nodes[j].weight;
        const double gj = normalized(j);
        beta += cj * cj * gj * gj * p(i, j) * p(r, j);
      }
      co.beta(i, r) = beta;
    }
  }
  return co;
}

namespace {

// Per-tap recursion in O(N M): sum_{r != i} beta_ir K_rr is expanded as
// sum_j a_j^2 p_ij (sum_r p_rj K_rr - p_ij K_ii), with a_j = c_j mu_j.
Eigen::VectorXd general_msd_update(const Eigen::VectorXd& k, const NetworkConfig& cfg, const Eigen::VectorXd& cmu,
                                   const Eigen::MatrixXd& p) {
  const long taps = cfg.taps();
  const long m = cfg.node_count();
  const Eigen::VectorXd weighted = p.transpose() * k;  // sum_r p_rj K_rr per node
  Eigen::VectorXd out(taps);
  for (long i = 0; i < taps; ++i) {
    double linear = 0.0;
    double square_sum = 0.0;
    double kurt = 0.0;
    double coupling = 0.0;
    double gamma = cfg.plant.sigma_q2;
    for (long j = 0; j < m; ++j) {
      const double g = cmu[j] * p(i, j);
      const double a2 = cmu[j] * cmu[j];
      linear += g;
      square_sum += g * g;
      kurt += g * g * cfg.nodes[j].dist.kurtosis();
      coupling += a2 * p(i, j) * (weighted[j] - p(i, j) * k[i]);
      gamma += a2 * cfg.nodes[j].noise_power * p(i, j);
    }
    const double alpha = 2.0 * linear - kurt - (linear * linear - square_sum);
    out[i] = k[i] - alpha * k[i] + coupling + gamma;
  }
  return out;
}

Eigen::VectorXd combined_steps(const NetworkConfig& cfg, const Eigen::VectorXd& steps) {
  return cfg.weights().cwiseProduct(steps);
}

TheoryState mean_update(const TheoryState& s, const NetworkConfig& cfg, const Eigen::VectorXd& steps) {
  const Eigen::MatrixXd p = lagged_powers(cfg, s.n);
  const Eigen::VectorXd factor = Eigen::VectorXd::Ones(cfg.taps()) - p * combined_steps(cfg, steps);
  TheoryState out = s;
  out.mean_dev = factor.cwiseProduct(s.mean_dev);
  out.n = s.n + 1;
  return out;
}

TheoryState msd_update(const TheoryState& s, const NetworkConfig& cfg, const Eigen::VectorXd& steps) {
  TheoryState out = s;
  out.k_diag = general_msd_update(s.k_diag, cfg, combined_steps(cfg, steps), lagged_powers(cfg, s.n));
  out.n = s.n + 1;
  return out;
}

// Slow-model per-node gains g_j = c_j mu_j sigma_j^2(n) and noise forcing.
struct SlowTerms {
  Eigen::VectorXd gain;
  double noise = 0.0;
};

SlowTerms slow_terms(const NetworkConfig& cfg, long n) {
  const long m = cfg.node_count();
  const double big_n = static_cast<double>(cfg.taps());
  SlowTerms t{Eigen::VectorXd(m), 0.0};
  for (long j = 0; j < m; ++j) {
    const auto& node = cfg.nodes[j];
    const double power = node.profile.at(n);
    if (cfg.algorithm == Algorithm::Dlms) {
      t.gain[j] = node.weight * node.step * power;
      t.noise += node.weight * node.weight * node.step * node.step * node.noise_power * power;
    } else {
      t.gain[j] = node.weight * node.step / big_n;
      t.noise += node.weight * node.weight * node.step * node.step * node.noise_power / (big_n * big_n * power);
    }
  }
  return t;
}

}  // namespace

TheoryState mean_step_dlms(const TheoryState& s, const NetworkConfig& cfg) { return mean_update(s, cfg, cfg.steps()); }

TheoryState mean_step_dnlms(const TheoryState& s, const NetworkConfig& cfg) {
  return mean_update(s, cfg, dnlms_equivalent_steps(cfg, s.n));
}

TheoryState msd_step_dlms_general(const TheoryState& s, const NetworkConfig& cfg) {
  return msd_update(s, cfg, cfg.steps());
}

TheoryState msd_step_dnlms_general(const TheoryState& s, const NetworkConfig& cfg) {
  return msd_update(s, cfg, dnlms_equivalent_steps(cfg, s.n));
}

SlowMsdCoefficients slow_msd_coefficients(const NetworkConfig& cfg, long n) {
  const double big_n = static_cast<double>(cfg.taps());
  double linear = 0.0;
  double quad = 0.0;
  double noise = 0.0;
  for (const auto& node : cfg.nodes) {
    const double c = node.weight;
    const double psi = node.dist.kurtosis();
    const double power = node.profile.at(n);
    if (cfg.algorithm == Algorithm::Dlms) {
      const double mu = node.step;
      linear += c * mu * power;
      quad += c * c * mu * mu * power * power * (psi + big_n - 2.0);
      noise += c * c * mu * mu * node.noise_power * power;
    } else {
      const double xi = node.step;
      linear += c * xi / big_n;
      quad += c * c * xi * xi * (psi + big_n - 2.0) / (big_n * big_n);
      noise += c * c * xi * xi * node.noise_power / (big_n * big_n * power);
    }
  }
  const SlowMsdCoefficients out{1.0 - 2.0 * linear + quad + linear * linear,
                                big_n * noise + big_n * cfg.plant.sigma_q2};
  return out;
}

double slow_mean_factor(const NetworkConfig& cfg, long n) { return 1.0 - slow_terms(cfg, n).gain.sum(); }

TheoryState msd_step_slow(const TheoryState& s, const NetworkConfig& cfg) {
  const SlowTerms t = slow_terms(cfg, s.n);
  const double linear = t.gain.sum();
  double square_sum = 0.0;
  double kurt = 0.0;
  for (long j = 0; j < cfg.node_count(); ++j) {
    square_sum += t.gain[j] * t.gain[j];
    kurt += t.gain[j] * t.gain[j] * cfg.nodes[j].dist.kurtosis();
  }
  const double alpha = 2.0 * linear - kurt - (linear * linear - square_sum);
  const double beta = square_sum;
  const double gamma = t.noise + cfg.plant.sigma_q2;
  const double msd = s.msd();

  TheoryState out = s;
  out.k_diag = s.k_diag.array() - (alpha + beta) * s.k_diag.array() + beta * msd + gamma;
  out.mean_dev = (1.0 - linear) * s.mean_dev;
  out.n = s.n + 1;
  return out;
}

double dnlms_transient_factor(const Eigen::VectorXd& weights, const Eigen::VectorXd& kurtoses, long taps, double xi) {
  const double big_n = static_cast<double>(taps);
  const double spread = (weights.array().square() * (kurtoses.array() + big_n - 2.0)).sum();
  return 1.0 - 2.0 * xi / big_n + (xi * xi) / (big_n * big_n) * spread + (xi * xi) / (big_n * big_n);
}

SteadyState steady_state_msd(const NetworkConfig& cfg, long n) {
  const SlowMsdCoefficients co = slow_msd_coefficients(cfg, n);
  const double denom = 1.0 - co.transient;
  if (!(denom > 0.0))
    throw NonPositiveDenominator("steady-state MSD: step sizes outside the stability region at n = " +
                                 std::to_string(n));
  bool varying = false;
  for (const auto& node : cfg.nodes) varying = varying || !node.profile.is_constant();
  return SteadyState{co.forcing / denom, varying};
}

SlowMsdCoefficients wss_dlms_coefficients(const WssNetwork& w, double lambda) {
  const double big_n = static_cast<double>(w.taps);
  const double spread = (w.weights.array().square() * (w.kurtoses.array() + big_n - 2.0)).sum();
  const double noise = (w.weights.array().square() / w.snrs.array()).sum();
  return {1.0 - 2.0 * lambda + lambda * lambda * spread + lambda * lambda,
          big_n * lambda * lambda * noise + big_n * w.sigma_q2};
}

SlowMsdCoefficients wss_dnlms_coefficients(const WssNetwork& w, double xi) {
  const double big_n = static_cast<double>(w.taps);
  const double noise = (w.weights.array().square() / w.snrs.array()).sum();
  return {dnlms_transient_factor(w.weights, w.kurtoses, w.taps, xi), xi * xi / big_n * noise + big_n * w.sigma_q2};
}

double wss_small_step_msd_dlms(const WssNetwork& w, double lambda) {
  const double big_n = static_cast<double>(w.taps);
  const double noise = (w.weights.array().square() / w.snrs.array()).sum();
  return 0.5 * (big_n * lambda * noise + big_n * w.sigma_q2 / lambda);
}

double wss_small_step_msd_dnlms(const WssNetwork& w, double xi) {
  const double big_n = static_cast<double>(w.taps);
  const double noise = (w.weights.array().square() / w.snrs.array()).sum();
  return 0.5 * xi * noise + big_n * big_n * w.sigma_q2 / (2.0 * xi);
}

ScalarIteration iterate_scalar_recursion(const SlowMsdCoefficients& c, double x0, long max_steps, double tol,
                                         double divergence_factor) {
  ScalarIteration it;
  const double limit = divergence_factor * (x0 > 0.0 ? x0 : 1.0);
  double x = x0;
  for (long k = 0; k < max_steps; ++k) {
    const double next = c.transient * x + c.forcing;
    it.steps = k + 1;
    if (!std::isfinite(next) || next > limit) {
      it.diverged = true;
      it.value = next;
      return it;
    }
    if (std::abs(next - x) <= tol * std::abs(next)) {
      it.converged = true;
      it.value = next;
      return it;
    }
    x = next;
  }
  it.value = x;
  return it;
}

std::string to_string(TheoryModel m) {
  switch (m) {
    case TheoryModel::General: return "general";
    case TheoryModel::Slow: return "slow";
    case TheoryModel::Both: return "both";
  }
  return "general";
}

TheoryTrajectory run_theory(const NetworkConfig& cfg, long horizon, TheoryModel model) {
  cfg.validate();
  if (model == TheoryModel::Both) throw std::invalid_argument("run_theory: pick one model per trajectory");
  TheoryTrajectory tr;
  if (cfg.algorithm == Algorithm::Dnlms && static_cast<double>(cfg.taps()) <= 10.0 * cfg.max_kurtosis())
    tr.warnings.push_back(fmt::format("NLMS model assumes N >> kurtosis; N = {} <= 10 * max kurtosis = {:g}",
                                      cfg.taps(), 10.0 * cfg.max_kurtosis()));
  if (model == TheoryModel::Slow) {
    // the slow model is only meaningful when periods are long compared to N
    for (std::size_t j = 0; j < cfg.nodes.size(); ++j) {
      const auto period = cfg.nodes[j].profile.period();
      if (period && *period > 1 && *period < 10 * cfg.taps()) {
        tr.warnings.push_back("slow-power model used with node " + std::to_string(j + 1) + " period " +
                              std::to_string(*period) + " < 10 N");
        break;
      }
    }
  }

  tr.msd.assign(horizon + 1, std::numeric_limits<double>::infinity());
  tr.mean_dev_norm.assign(horizon + 1, std::numeric_limits<double>::quiet_NaN());
  TheoryState s = initial_theory_state(cfg);
  const double msd0 = s.msd();
  const double limit = kTheoryDivergenceFactor * (msd0 > 0.0 ? msd0 : 1.0);
  const bool nlms = cfg.algorithm == Algorithm::Dnlms;
  for (long n = 0; n <= horizon; ++n) {
    const double msd = s.msd();
    if (!std::isfinite(msd) || msd > limit) {
      tr.diverged = true;
      break;
    }
    tr.msd[n] = msd;
    tr.mean_dev_norm[n] = s.mean_dev.norm();
    if (n == horizon) break;
    if (model == TheoryModel::Slow) {
      s = msd_step_slow(s, cfg);
    } else {
      const Eigen::VectorXd steps = nlms ? dnlms_equivalent_steps(cfg, s.n) : cfg.steps();
      TheoryState next = msd_update(s, cfg, steps);
      next.mean_dev = mean_update(s, cfg, steps).mean_dev;
      s = std::move(next);
    }
  }
  return tr;
}

}  // namespace fcdiff
