#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace fcdiff {

/// sigma^2(n) = beta * (1 + sin(omega * n))
struct Sinusoidal {
  double beta = 1.0;
  double omega = 0.0;  // rad/sample
};

/// P1 on the first alpha*T samples of each period (phase 1..T), P2 on the rest.
struct Pulsed {
  double p1 = 1.0;
  double p2 = 1.0;
  long period = 1;
  double alpha = 0.5;
};

struct Constant {
  double sigma2 = 1.0;
};

/// Deterministic periodic nodal input power sequence.
class PowerProfile {
 public:
  using Variant = std::variant<Sinusoidal, Pulsed, Constant>;

  PowerProfile() : PowerProfile(Constant{}) {}
  PowerProfile(Sinusoidal s);
  PowerProfile(Pulsed p);
  PowerProfile(Constant c);

  /// Convenience: omega = 2*pi/period.
  static PowerProfile sinusoid_with_period(double beta, double period);

  const Variant& variant() const { return variant_; }

  /// Power at signed sample index n. Negative n evaluates the formula
  /// directly (sinusoid) or by periodic extension (pulsed).
  double at(long n) const;

  /// Repetition period in samples, if the profile repeats on an integer grid
  /// (1 for constant). Sinusoids are detected when omega/2pi is a ratio p/q
  /// with q <= max_period.
  std::optional<long> period(long max_period = 1L << 22) const;

  /// Average power over one period (beta for sinusoids).
  double mean_power() const;

  bool is_constant() const { return std::holds_alternative<Constant>(variant_); }

 private:
  Variant variant_;
};

double power_at(const PowerProfile& profile, long n);

enum class DistributionKind { Gaussian, Uniform, Laplacian, GaussianFifthPower, ThreePoint };

/// Zero-mean, unit-variance i.i.d. shaping law with known kurtosis E[s^4].
class InputDistribution {
 public:
  static InputDistribution gaussian() { return InputDistribution(DistributionKind::Gaussian, 3.0); }
  static InputDistribution uniform() { return InputDistribution(DistributionKind::Uniform, 9.0 / 5.0); }
  static InputDistribution laplacian() { return InputDistribution(DistributionKind::Laplacian, 6.0); }
  static InputDistribution gaussian_fifth_power();
  /// Values {-sqrt(psi), 0, +sqrt(psi)} with probabilities {1/(2psi), 1-1/psi, 1/(2psi)}.
  /// Throws std::invalid_argument for psi < 1.
  static InputDistribution three_point(double kurtosis);

  DistributionKind kind() const { return kind_; }
  double kurtosis() const { return kurtosis_; }
  std::string name() const;

  /// One draw using the given engine.
  template <class Engine>
  double draw(Engine& engine, std::normal_distribution<double>& normal) const;

  friend bool operator==(const InputDistribution&, const InputDistribution&) = default;

 private:
  InputDistribution(DistributionKind kind, double kurtosis) : kind_(kind), kurtosis_(kurtosis) {}

  DistributionKind kind_;
  double kurtosis_;
};

double kurtosis_of(const InputDistribution& dist);

/// E[u^20] / 945^2 for standard normal u: 19!! / 945^2.
inline constexpr double kGaussianFifthPowerKurtosis = 654729075.0 / (945.0 * 945.0);

enum class StreamRole : std::uint32_t { Input = 0, Noise = 1, Plant = 2 };

/// Identity of an independent random stream: (master seed, run, node, role).
struct RngStreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t run = 0;
  std::uint32_t node = 0;
  StreamRole role = StreamRole::Input;
};

/// A reproducible random stream. The engine is seeded through std::seed_seq
/// from every component of the stream id, so streams never depend on the
/// order in which they are created or used.
class RngStream {
 public:
  explicit RngStream(const RngStreamSpec& spec);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }
  double draw(const InputDistribution& dist) { return dist.draw(engine_, normal_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

std::vector<double> sample(const InputDistribution& dist, const RngStreamSpec& stream, std::size_t count);

struct PlantModel {
  long taps = 0;
  double sigma_q2 = 0.0;
  Eigen::VectorXd h0;

  void validate() const;
};

/// h0[i] = decay^|i - floor(N/2)|, zero-based, not normalized.
Eigen::VectorXd two_sided_exponential(long taps, double decay);

/// H(0..horizon) as columns, H(n+1) = H(n) + Q(n), Q(n) ~ N(0, sigma_q2 I).
Eigen::MatrixXd make_plant(const PlantModel& model, const RngStreamSpec& stream, long horizon);

// ---- inline ---------------------------------------------------------------

template <class Engine>
double InputDistribution::draw(Engine& engine, std::normal_distribution<double>& normal) const {
  auto u01 = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
  switch (kind_) {
    case DistributionKind::Gaussian:
      return normal(engine);
    case DistributionKind::Uniform:
      return 1.7320508075688772 * (2.0 * u01() - 1.0);
    case DistributionKind::Laplacian: {
      // inverse CDF, scale 1/sqrt(2); u strictly inside (-1/2, 1/2)
      const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
      const double mag = -0.70710678118654752 * std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? -mag : mag;
    }
    case DistributionKind::GaussianFifthPower: {
      const double g = normal(engine);
      const double g2 = g * g;
      return g2 * g2 * g / 30.740852297878796;  // sqrt(945)
    }
    case DistributionKind::ThreePoint: {
      const double v = u01();
      const double tail = 0.5 / kurtosis_;
      if (v < tail) return -std::sqrt(kurtosis_);
      if (v < 2.0 * tail) return std::sqrt(kurtosis_);
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace fcdiff
