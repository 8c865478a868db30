#include "fcdiff/signal_models.hpp"

#include <numbers>

namespace fcdiff {

PowerProfile::PowerProfile(Sinusoidal s) : variant_(s) {
  if (!(s.beta > 0.0)) throw std::invalid_argument("sinusoidal profile: beta must be > 0");
  if (!std::isfinite(s.omega)) throw std::invalid_argument("sinusoidal profile: omega must be finite");
}

PowerProfile::PowerProfile(Pulsed p) : variant_(p) {
  if (!(p.p1 > 0.0) || !(p.p2 > 0.0)) throw std::invalid_argument("pulsed profile: P1 and P2 must be > 0");
  if (p.period < 1) throw std::invalid_argument("pulsed profile: T must be >= 1");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw std::invalid_argument("pulsed profile: alpha must lie in (0, 1)");
}

PowerProfile::PowerProfile(Constant c) : variant_(c) {
  if (!(c.sigma2 > 0.0)) throw std::invalid_argument("constant profile: sigma2 must be > 0");
}

PowerProfile PowerProfile::sinusoid_with_period(double beta, double period) {
  return PowerProfile(Sinusoidal{beta, 2.0 * std::numbers::pi / period});
}

namespace {

double pulsed_at(const Pulsed& p, long n) {
  const long t = p.period;
  const long phase = (((n - 1) % t) + t) % t + 1;  // 1..T
  double threshold = p.alpha * static_cast<double>(t);
  const double nearest = std::round(threshold);
  if (std::abs(threshold - nearest) < 1e-9) threshold = nearest;
  return static_cast<double>(phase) <= threshold ? p.p1 : p.p2;
}

}  // namespace

double PowerProfile::at(long n) const {
  return std::visit(
      [n](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Sinusoidal>) {
          return std::max(0.0, v.beta * (1.0 + std::sin(v.omega * static_cast<double>(n))));
        } else if constexpr (std::is_same_v<T, Pulsed>) {
          return pulsed_at(v, n);
        } else {
          return v.sigma2;
        }
      },
      variant_);
}

std::optional<long> PowerProfile::period(long max_period) const {
  if (const auto* p = std::get_if<Pulsed>(&variant_)) return p->period;
  if (std::holds_alternative<Constant>(variant_)) return 1L;
  const double cycles = std::get<Sinusoidal>(variant_).omega / (2.0 * std::numbers::pi);
  if (cycles == 0.0) return 1L;
  for (long q = 1; q <= max_period; ++q) {
    const double x = cycles * static_cast<double>(q);
    if (std::abs(x - std::round(x)) < 1e-9) return q;
  }
  return std::nullopt;
}

double PowerProfile::mean_power() const {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Sinusoidal>) {
          return v.beta;
        } else if constexpr (std::is_same_v<T, Pulsed>) {
          double sum = 0.0;
          for (long n = 1; n <= v.period; ++n) sum += pulsed_at(v, n);
          return sum / static_cast<double>(v.period);
        } else {
          return v.sigma2;
        }
      },
      variant_);
}

double power_at(const PowerProfile& profile, long n) { return profile.at(n); }

InputDistribution InputDistribution::gaussian_fifth_power() {
  return InputDistribution(DistributionKind::GaussianFifthPower, kGaussianFifthPowerKurtosis);
}

InputDistribution InputDistribution::three_point(double kurtosis) {
  if (!(kurtosis >= 1.0)) throw std::invalid_argument("three-point distribution requires kurtosis >= 1");
  return InputDistribution(DistributionKind::ThreePoint, kurtosis);
}

std::string InputDistribution::name() const {
  switch (kind_) {
    case DistributionKind::Gaussian: return "gaussian";
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::Laplacian: return "laplacian";
    case DistributionKind::GaussianFifthPower: return "gaussian_fifth_power";
    case DistributionKind::ThreePoint: return "three_point";
  }
  return "unknown";
}

double kurtosis_of(const InputDistribution& dist) { return dist.kurtosis(); }

namespace {

std::seed_seq make_seed_seq(const RngStreamSpec& s) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  return std::seed_seq{0x66636466u, lo(s.master_seed), hi(s.master_seed), lo(s.run), hi(s.run), s.node,
                       static_cast<std::uint32_t>(s.role)};
}

}  // namespace

RngStream::RngStream(const RngStreamSpec& spec) {
  auto seq = make_seed_seq(spec);
  engine_.seed(seq);
}

std::vector<double> sample(const InputDistribution& dist, const RngStreamSpec& stream, std::size_t count) {
  RngStream rng(stream);
  std::vector<double> out(count);
  for (auto& v : out) v = rng.draw(dist);
  return out;
}

void PlantModel::validate() const {
  if (taps < 1) throw std::invalid_argument("plant: N must be >= 1");
  if (!(sigma_q2 >= 0.0)) throw std::invalid_argument("plant: sigma_q2 must be >= 0");
  if (h0.size() != taps) throw std::invalid_argument("plant: h0 must have exactly N entries");
}

Eigen::VectorXd two_sided_exponential(long taps, double decay) {
  Eigen::VectorXd h(taps);
  const long center = taps / 2;
  for (long i = 0; i < taps; ++i) h[i] = std::pow(decay, static_cast<double>(std::abs(i - center)));
  return h;
}

Eigen::MatrixXd make_plant(const PlantModel& model, const RngStreamSpec& stream, long horizon) {
  model.validate();
  if (horizon < 0) throw std::invalid_argument("make_plant: horizon must be >= 0");
  Eigen::MatrixXd h(model.taps, horizon + 1);
  h.col(0) = model.h0;
  RngStream rng(stream);
  const double sd = std::sqrt(model.sigma_q2);
  for (long n = 0; n < horizon; ++n) {
    h.col(n + 1) = h.col(n);
    if (sd > 0.0)
      for (long i = 0; i < model.taps; ++i) h(i, n + 1) += sd * rng.normal();
  }
  return h;
}

}  // namespace fcdiff
