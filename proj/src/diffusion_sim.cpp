#include "fcdiff/diffusion_sim.hpp"

#include <cmath>
#include <limits>

namespace fcdiff {

RunStreams::RunStreams(const NetworkConfig& cfg, std::uint64_t master_seed, std::uint64_t run)
    : cfg_(&cfg),
      plant_(RngStreamSpec{master_seed, run, 0, StreamRole::Plant}),
      plant_sd_(std::sqrt(cfg.plant.sigma_q2)) {
  const auto m = static_cast<std::uint32_t>(cfg.nodes.size());
  input_.reserve(m);
  noise_.reserve(m);
  for (std::uint32_t j = 0; j < m; ++j) {
    input_.emplace_back(RngStreamSpec{master_seed, run, j, StreamRole::Input});
    noise_.emplace_back(RngStreamSpec{master_seed, run, j, StreamRole::Noise});
    noise_sd_.push_back(std::sqrt(cfg.nodes[j].noise_power));
  }
}

double RunStreams::next_input(long node, long n) {
  const auto& cfg = cfg_->nodes[node];
  return std::sqrt(cfg.profile.at(n)) * input_[node].draw(cfg.dist);
}

double RunStreams::next_noise(long node) {
  // the stream is consumed even for zero noise so draws stay aligned across configs
  return noise_sd_[node] * noise_[node].normal();
}

void RunStreams::next_increment(Eigen::Ref<Eigen::VectorXd> q) {
  if (plant_sd_ == 0.0) {
    q.setZero();
    return;
  }
  for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = plant_sd_ * plant_.normal();
}

namespace {

void push_sample(Eigen::MatrixXd& regressors, long node, double x) {
  auto col = regressors.col(node);
  const Eigen::Index n = col.size();
  for (Eigen::Index k = n - 1; k > 0; --k) col[k] = col[k - 1];
  col[0] = x;
}

// H(n) -> H(n+1), X_j(n) -> X_j(n+1)
void advance(McRunState& s, const NetworkConfig& cfg, long n, RunStreams& streams) {
  streams.next_increment(s.increment);
  s.plant += s.increment;
  for (long j = 0; j < cfg.node_count(); ++j) push_sample(s.regressors, j, streams.next_input(j, n + 1));
}

// sum_j c_j v_j in node order; CTA and ATC share it so their fusion outputs
// see identical rounding.
void combine(const Eigen::MatrixXd& v, const NetworkConfig& cfg, Eigen::VectorXd& out) {
  out.setZero();
  for (long j = 0; j < cfg.node_count(); ++j) out += cfg.nodes[j].weight * v.col(j);
}

// Local adaptation from a common estimate; writes each node's new vector.
// Returns the number of skipped (degenerate NLMS) updates.
long adapt_from(const Eigen::VectorXd& common, McRunState& s, const NetworkConfig& cfg, bool normalized,
                RunStreams& streams) {
  long skipped = 0;
  for (long j = 0; j < cfg.node_count(); ++j) {
    const auto x = s.regressors.col(j);
    const double desired = x.dot(s.plant) + streams.next_noise(j);
    const double error = desired - x.dot(common);
    double gain = cfg.nodes[j].step;
    if (normalized) {
      const double energy = x.squaredNorm() + cfg.nlms_epsilon;
      if (energy == 0.0) {
        s.node_weights.col(j) = common;
        ++skipped;
        continue;
      }
      gain /= energy;
    }
    s.node_weights.col(j) = common + (gain * error) * x;
  }
  return skipped;
}

void cta_step(McRunState& s, const NetworkConfig& cfg, long n, RunStreams& streams, bool normalized) {
  Eigen::VectorXd theta(cfg.taps());
  combine(s.node_weights, cfg, theta);
  s.skipped_updates += adapt_from(theta, s, cfg, normalized, streams);
  advance(s, cfg, n, streams);
}

void atc_step(McRunState& s, const NetworkConfig& cfg, long n, RunStreams& streams, bool normalized) {
  s.skipped_updates += adapt_from(s.common, s, cfg, normalized, streams);
  combine(s.node_weights, cfg, s.common);
  advance(s, cfg, n, streams);
}

}  // namespace

McRunState init_run_state(const NetworkConfig& cfg, RunStreams& streams) {
  const long taps = cfg.taps();
  const long m = cfg.node_count();
  McRunState s;
  s.node_weights = Eigen::MatrixXd::Zero(taps, m);
  s.common = Eigen::VectorXd::Zero(taps);
  s.plant = cfg.plant.h0;
  s.increment = Eigen::VectorXd::Zero(taps);
  s.regressors = Eigen::MatrixXd::Zero(taps, m);
  for (long j = 0; j < m; ++j)
    for (long t = -(taps - 1); t <= 0; ++t) push_sample(s.regressors, j, streams.next_input(j, t));
  return s;
}

Eigen::VectorXd fusion_deviation(const McRunState& state, const NetworkConfig& cfg) {
  if (cfg.strategy == Strategy::Atc) return state.common - state.plant;
  Eigen::VectorXd theta(cfg.taps());
  combine(state.node_weights, cfg, theta);
  return theta - state.plant;
}

void cta_dlms_step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams) {
  cta_step(state, cfg, n, streams, false);
}

void atc_dlms_step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams) {
  atc_step(state, cfg, n, streams, false);
}

void cta_dnlms_step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams) {
  cta_step(state, cfg, n, streams, true);
}

void atc_dnlms_step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams) {
  atc_step(state, cfg, n, streams, true);
}

void step(McRunState& state, const NetworkConfig& cfg, long n, RunStreams& streams) {
  const bool normalized = cfg.algorithm == Algorithm::Dnlms;
  if (cfg.strategy == Strategy::Cta)
    cta_step(state, cfg, n, streams, normalized);
  else
    atc_step(state, cfg, n, streams, normalized);
}

RunOutcome accumulate_run(const NetworkConfig& cfg, std::uint64_t master_seed, std::uint64_t run, long horizon,
                          std::span<double> msd_sum, Eigen::MatrixXd* deviation_sum, double divergence_factor) {
  RunStreams streams(cfg, master_seed, run);
  McRunState state = init_run_state(cfg, streams);
  RunOutcome outcome;

  double limit = 0.0;
  for (long n = 0; n <= horizon; ++n) {
    const Eigen::VectorXd p = fusion_deviation(state, cfg);
    const double msd = p.squaredNorm();
    if (n == 0) limit = divergence_factor * (msd > 0.0 ? msd : 1.0);
    if (!std::isfinite(msd) || msd > limit) {
      outcome.diverged = true;
      outcome.stopped_at = n;
      for (long k = n; k <= horizon; ++k) {
        msd_sum[k] += std::numeric_limits<double>::infinity();
        if (deviation_sum) deviation_sum->col(k).setConstant(std::numeric_limits<double>::quiet_NaN());
      }
      break;
    }
    msd_sum[n] += msd;
    if (deviation_sum) deviation_sum->col(n) += p;
    if (n < horizon) step(state, cfg, n, streams);
  }
  outcome.skipped_updates = state.skipped_updates;
  return outcome;
}

RunTrace trace_run(const NetworkConfig& cfg, std::uint64_t master_seed, std::uint64_t run, long horizon) {
  RunTrace trace;
  trace.msd.assign(horizon + 1, 0.0);
  trace.deviation = Eigen::MatrixXd::Zero(cfg.taps(), horizon + 1);
  trace.outcome = accumulate_run(cfg, master_seed, run, horizon, trace.msd, &trace.deviation);
  return trace;
}

}  // namespace fcdiff
