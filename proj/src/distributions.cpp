#include "tailrisk/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "tailrisk/error.hpp"

namespace tailrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::InvalidArgument, what);
}

bool finite(double x) { return std::isfinite(x); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

boost::math::students_t_distribution<double> student(double dof) {
  return boost::math::students_t_distribution<double>(dof);
}

// Bisection on the CDF. The bracket is grown geometrically from the scale
// of the distribution until it straddles alpha.
double invert_cdf(const DistributionSpec& dist, double alpha, double scale) {
  double lo = -scale;
  double hi = scale;
  while (cdf(dist, lo) > alpha) lo *= 2.0;
  while (cdf(dist, hi) < alpha) hi *= 2.0;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cdf(dist, mid) < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Order p moment for a tail index `index` (Pareto shape or Student-t dof):
// 2 when the variance exists, otherwise halfway between 1 and the index.
double moment_order_for_index(double index) {
  if (index <= 1.0) {
    fail(ErrorKind::NoFiniteMoment, "no order p in (1, 2] has a finite moment");
  }
  return index > 2.0 ? 2.0 : 0.5 * (1.0 + index);
}

}  // namespace

RiskLevel::RiskLevel(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::InvalidArgument, "risk level must lie strictly inside (0, 1)");
  }
}

DistributionSpec::DistributionSpec(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const Gaussian& g) {
                   require(finite(g.mean), "gaussian mean must be finite");
                   require(finite(g.stddev) && g.stddev > 0.0, "gaussian stddev must be > 0");
                 },
                 [](const Exponential& e) {
                   require(finite(e.mean) && e.mean > 0.0, "exponential mean must be > 0");
                 },
                 [](const Pareto& p) {
                   require(finite(p.scale) && p.scale > 0.0, "pareto scale must be > 0");
                   require(finite(p.shape) && p.shape > 0.0, "pareto shape must be > 0");
                 },
                 [](const Lognormal& l) {
                   require(finite(l.mu), "lognormal mu must be finite");
                   require(finite(l.sigma) && l.sigma > 0.0, "lognormal sigma must be > 0");
                 },
                 [](const StudentT& t) {
                   require(finite(t.dof) && t.dof > 0.0, "student_t dof must be > 0");
                   require(finite(t.scale) && t.scale > 0.0, "student_t scale must be > 0");
                 },
             },
             family_);
}

std::string DistributionSpec::family_name() const {
  return std::visit(overloaded{
                        [](const Gaussian&) { return std::string("gaussian"); },
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const Pareto&) { return std::string("pareto"); },
                        [](const Lognormal&) { return std::string("lognormal"); },
                        [](const StudentT&) { return std::string("student_t"); },
                    },
                    family_);
}

double cdf(const DistributionSpec& dist, double x) {
  return std::visit(
      overloaded{
          [x](const Gaussian& g) { return normal_cdf((x - g.mean) / g.stddev); },
          [x](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-x / e.mean); },
          [x](const Pareto& p) {
            return x <= p.scale ? 0.0 : -std::expm1(p.shape * std::log(p.scale / x));
          },
          [x](const Lognormal& l) {
            return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - l.mu) / l.sigma);
          },
          [x](const StudentT& t) { return boost::math::cdf(student(t.dof), x / t.scale); },
      },
      dist.family());
}

double pdf(const DistributionSpec& dist, double x) {
  return std::visit(
      overloaded{
          [x](const Gaussian& g) { return normal_pdf((x - g.mean) / g.stddev) / g.stddev; },
          [x](const Exponential& e) { return x < 0.0 ? 0.0 : std::exp(-x / e.mean) / e.mean; },
          [x](const Pareto& p) {
            return x < p.scale ? 0.0 : p.shape / x * std::pow(p.scale / x, p.shape);
          },
          [x](const Lognormal& l) {
            return x <= 0.0 ? 0.0 : normal_pdf((std::log(x) - l.mu) / l.sigma) / (x * l.sigma);
          },
          [x](const StudentT& t) {
            return boost::math::pdf(student(t.dof), x / t.scale) / t.scale;
          },
      },
      dist.family());
}

Sampler::Sampler(DistributionSpec dist, RandomStream stream)
    : dist_(std::move(dist)), stream_(std::move(stream)) {
  if (const auto* t = std::get_if<StudentT>(&dist_.family())) {
    student_ = std::student_t_distribution<double>(t->dof);
  }
}

double Sampler::operator()() {
  auto& eng = stream_.engine();
  return std::visit(
      overloaded{
          [&](const Gaussian& g) { return g.mean + g.stddev * normal_(eng); },
          [&](const Exponential& e) { return e.mean * exponential_(eng); },
          [&](const Pareto& p) {
            // 1 - U lies in (0, 1], so the variate is finite and >= scale.
            return p.scale * std::pow(1.0 - uniform_(eng), -1.0 / p.shape);
          },
          [&](const Lognormal& l) { return std::exp(l.mu + l.sigma * normal_(eng)); },
          [&](const StudentT& t) { return t.scale * student_(eng); },
      },
      dist_.family());
}

void Sampler::fill(std::vector<double>& out, std::size_t count) {
  out.reserve(out.size() + count);
  for (std::size_t i = 0; i < count; ++i) out.push_back((*this)());
}

std::vector<double> sample(const DistributionSpec& dist, std::size_t n, RandomStream& rng) {
  Sampler sampler(dist, RandomStream(rng.next()));
  std::vector<double> out;
  sampler.fill(out, n);
  return out;
}

double normal_quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double standard_normal_cvar(RiskLevel level) {
  return normal_pdf(normal_quantile(level.value())) / level.tail_mass();
}

double true_var(const DistributionSpec& dist, RiskLevel level) {
  const double alpha = level.value();
  return std::visit(
      overloaded{
          [&](const Gaussian& g) { return g.mean + g.stddev * normal_quantile(alpha); },
          [&](const Exponential& e) { return -e.mean * std::log1p(-alpha); },
          [&](const Pareto& p) { return p.scale * std::pow(1.0 - alpha, -1.0 / p.shape); },
          [&](const Lognormal& l) { return std::exp(l.mu + l.sigma * normal_quantile(alpha)); },
          [&](const StudentT& t) { return invert_cdf(dist, alpha, t.scale); },
      },
      dist.family());
}

double true_cvar(const DistributionSpec& dist, RiskLevel level) {
  const double alpha = level.value();
  const double tail = level.tail_mass();
  return std::visit(
      overloaded{
          [&](const Gaussian& g) { return g.mean + g.stddev * standard_normal_cvar(level); },
          // Memoryless: the excess over v_alpha is again exponential.
          [&](const Exponential& e) { return true_var(dist, level) + e.mean; },
          [&](const Pareto& p) {
            if (p.shape <= 1.0) fail(ErrorKind::InfiniteCVaR, "pareto shape <= 1");
            return p.shape / (p.shape - 1.0) * true_var(dist, level);
          },
          [&](const Lognormal& l) {
            const double z = normal_quantile(alpha);
            return std::exp(l.mu + 0.5 * l.sigma * l.sigma) * normal_cdf(l.sigma - z) / tail;
          },
          [&](const StudentT& t) {
            if (t.dof <= 1.0) fail(ErrorKind::InfiniteCVaR, "student_t dof <= 1");
            const double q = true_var(dist, level) / t.scale;
            const double density = boost::math::pdf(student(t.dof), q);
            return t.scale * (t.dof + q * q) / (t.dof - 1.0) * density / tail;
          },
      },
      dist.family());
}

double absolute_moment(const DistributionSpec& dist, double p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const auto& fam = dist.family();
  if (const auto* par = std::get_if<Pareto>(&fam); par && p >= par->shape) return inf;
  if (const auto* t = std::get_if<StudentT>(&fam); t && p >= t->dof) return inf;

  // Integrate over (0, inf) after shifting to the lower end of the support;
  // two-sided families fold the negative half onto the positive one.
  double lower = 0.0;
  bool two_sided = false;
  std::visit(overloaded{
                 [&](const Gaussian&) { two_sided = true; },
                 [&](const Exponential&) {},
                 [&](const Pareto& par) { lower = par.scale; },
                 [&](const Lognormal&) {},
                 [&](const StudentT&) { two_sided = true; },
             },
             fam);

  auto integrand = [&](double t) {
    if (two_sided) return std::pow(t, p) * (pdf(dist, t) + pdf(dist, -t));
    const double x = lower + t;
    return std::pow(x, p) * pdf(dist, x);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(integrand, 0.0, inf, 1e-12);
}

TailClass tail_class(const DistributionSpec& dist) {
  auto bounded = [&](double p) -> TailClass {
    return BoundedMoment{p, kMomentInflation * absolute_moment(dist, p)};
  };
  return std::visit(overloaded{
                        // b is zero in the limit for a Gaussian; report b = stddev so the
                        // large-deviation branch of the bound stays finite.
                        [](const Gaussian& g) -> TailClass {
                          return LightTailed{g.stddev, g.stddev};
                        },
                        [](const Exponential& e) -> TailClass {
                          return LightTailed{2.0 * e.mean, 2.0 * e.mean};
                        },
                        [&](const Pareto& par) { return bounded(moment_order_for_index(par.shape)); },
                        [&](const Lognormal&) { return bounded(2.0); },
                        [&](const StudentT& t) { return bounded(moment_order_for_index(t.dof)); },
                    },
                    dist.family());
}

}  // namespace tailrisk
