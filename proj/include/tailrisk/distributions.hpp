#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "tailrisk/random.hpp"

namespace tailrisk {

/// A risk level alpha, strictly inside (0, 1).
class RiskLevel {
 public:
  explicit RiskLevel(double alpha);

  double value() const noexcept { return alpha_; }
  /// 1 - alpha, the probability mass of the upper tail.
  double tail_mass() const noexcept { return 1.0 - alpha_; }

  friend bool operator==(RiskLevel, RiskLevel) = default;

 private:
  double alpha_;
};

struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

struct Exponential {
  double mean = 1.0;
  friend bool operator==(const Exponential&, const Exponential&) = default;
};

/// Support [scale, inf), tail P(X > x) = (scale / x)^shape.
struct Pareto {
  double scale = 1.0;
  double shape = 3.0;
  friend bool operator==(const Pareto&, const Pareto&) = default;
};

/// exp(N(mu, sigma^2)).
struct Lognormal {
  double mu = 0.0;
  double sigma = 1.0;
  friend bool operator==(const Lognormal&, const Lognormal&) = default;
};

/// scale * T where T is Student-t with `dof` degrees of freedom.
struct StudentT {
  double dof = 3.0;
  double scale = 1.0;
  friend bool operator==(const StudentT&, const StudentT&) = default;
};

using Family = std::variant<Gaussian, Exponential, Pareto, Lognormal, StudentT>;

/// A validated parametric distribution. Every family has a continuous,
/// strictly increasing CDF on its support.
///
/// Pareto shape and Student-t dof only need to be positive here; a tail
/// index <= 1 is representable so that true_cvar and tail_class can report
/// InfiniteCVaR / NoFiniteMoment instead of refusing to build the value.
class DistributionSpec {
 public:
  DistributionSpec(Family family);  // NOLINT(google-explicit-constructor)

  static DistributionSpec gaussian(double mean, double stddev) {
    return DistributionSpec(Gaussian{mean, stddev});
  }
  static DistributionSpec exponential(double mean) {
    return DistributionSpec(Exponential{mean});
  }
  static DistributionSpec pareto(double scale, double shape) {
    return DistributionSpec(Pareto{scale, shape});
  }
  static DistributionSpec lognormal(double mu, double sigma) {
    return DistributionSpec(Lognormal{mu, sigma});
  }
  static DistributionSpec student_t(double dof, double scale) {
    return DistributionSpec(StudentT{dof, scale});
  }

  const Family& family() const noexcept { return family_; }
  std::string family_name() const;

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;

 private:
  Family family_;
};

double cdf(const DistributionSpec& dist, double x);
double pdf(const DistributionSpec& dist, double x);

/// Draws i.i.d. variates from one distribution using a stream it owns.
/// Successive calls continue the same sequence, so the k-th variate depends
/// only on the seed and k.
class Sampler {
 public:
  Sampler(DistributionSpec dist, RandomStream stream);

  double operator()();
  void fill(std::vector<double>& out, std::size_t count);

  const DistributionSpec& distribution() const noexcept { return dist_; }

 private:
  DistributionSpec dist_;
  RandomStream stream_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::student_t_distribution<double> student_{1.0};
};

/// n i.i.d. draws. The sequence is a pure function of the stream's state.
std::vector<double> sample(const DistributionSpec& dist, std::size_t n, RandomStream& rng);

/// F^{-1}(alpha).
double true_var(const DistributionSpec& dist, RiskLevel level);

/// E[X | X >= v_alpha]. Throws InfiniteCVaR when the tail mean diverges.
double true_cvar(const DistributionSpec& dist, RiskLevel level);

/// CVaR of the standard normal at `level`: phi(z_alpha) / (1 - alpha).
double standard_normal_cvar(RiskLevel level);

/// Inverse of the standard normal CDF.
double normal_quantile(double p);

/// Parameters (sigma, b) of the MGF bound E[exp(l (X - EX))] <= exp(l^2 sigma^2 / 2)
/// for |l| < 1/b. The bound is stated for the centred variable.
struct LightTailed {
  double sigma = 0.0;
  double b = 0.0;
  friend bool operator==(const LightTailed&, const LightTailed&) = default;
};

/// E|X|^p < u for p in (1, 2].
struct BoundedMoment {
  double p = 2.0;
  double u = 1.0;
  friend bool operator==(const BoundedMoment&, const BoundedMoment&) = default;
};

using TailClass = std::variant<LightTailed, BoundedMoment>;

TailClass tail_class(const DistributionSpec& dist);

/// E|X|^p by numerical quadrature. Infinite when the moment does not exist.
double absolute_moment(const DistributionSpec& dist, double p);

/// Inflation applied to E|X|^p when reporting u.
inline constexpr double kMomentInflation = 1.05;

}  // namespace tailrisk
