#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>

namespace oracle {

namespace {

using namespace tailrisk;

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m,
               double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double student_density(double t, double nu) {
  const double log_norm =
      std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

}  // namespace

double density(const DistributionSpec& dist, double x) {
  const auto& fam = dist.family();
  if (const auto* g = std::get_if<Gaussian>(&fam)) {
    const double z = (x - g->mean) / g->stddev;
    return std::exp(-0.5 * z * z) / (g->stddev * std::sqrt(2.0 * std::numbers::pi));
  }
  if (const auto* e = std::get_if<Exponential>(&fam)) return x < 0 ? 0.0 : std::exp(-x / e->mean) / e->mean;
  if (const auto* p = std::get_if<Pareto>(&fam)) {
    return x < p->scale ? 0.0 : p->shape * std::pow(p->scale, p->shape) / std::pow(x, p->shape + 1.0);
  }
  if (const auto* l = std::get_if<Lognormal>(&fam)) {
    if (x <= 0) return 0.0;
    const double z = (std::log(x) - l->mu) / l->sigma;
    return std::exp(-0.5 * z * z) / (x * l->sigma * std::sqrt(2.0 * std::numbers::pi));
  }
  const auto& t = std::get<StudentT>(fam);
  return student_density(x / t.scale, t.dof) / t.scale;
}

double cdf(const DistributionSpec& dist, double x) {
  const auto& fam = dist.family();
  if (const auto* g = std::get_if<Gaussian>(&fam)) return std_normal_cdf((x - g->mean) / g->stddev);
  if (const auto* e = std::get_if<Exponential>(&fam)) return x <= 0 ? 0.0 : 1.0 - std::exp(-x / e->mean);
  if (const auto* p = std::get_if<Pareto>(&fam)) return x <= p->scale ? 0.0 : 1.0 - std::pow(p->scale / x, p->shape);
  if (const auto* l = std::get_if<Lognormal>(&fam)) {
    return x <= 0 ? 0.0 : std_normal_cdf((std::log(x) - l->mu) / l->sigma);
  }
  // Symmetric: F(x) = 1/2 + integral_0^x f.
  const double half = integrate([&](double s) { return density(dist, s); }, 0.0, std::abs(x), 1e-14);
  return x >= 0 ? 0.5 + half : 0.5 - half;
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, b, fb, m, fm, whole, tol, 60);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double tol) {
  auto mapped = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double s = 1.0 - t;
    return f(a + t / s) / (s * s);
  };
  // Split so the rule samples both the bulk near `a` and the far tail.
  double total = 0.0;
  const double cuts[] = {0.0, 0.5, 0.9, 0.99, 0.999, 0.9999, 1.0};
  for (int i = 0; i + 1 < 7; ++i) total += integrate(mapped, cuts[i], cuts[i + 1], tol / 6.0);
  return total;
}

double quantile(const DistributionSpec& dist, double alpha) {
  double lo = -1.0;
  double hi = 1.0;
  while (oracle::cdf(dist, lo) > alpha) lo *= 2.0;
  while (oracle::cdf(dist, hi) < alpha) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (oracle::cdf(dist, mid) < alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double tail_expectation(const DistributionSpec& dist, double alpha) {
  const double v = quantile(dist, alpha);
  const double mass = integrate_to_infinity([&](double x) { return x * density(dist, x); }, v, 1e-13);
  return mass / (1.0 - alpha);
}

double absolute_moment(const DistributionSpec& dist, double p) {
  const auto& fam = dist.family();
  if (const auto* g = std::get_if<Gaussian>(&fam)) {
    if (g->mean != 0.0) throw std::invalid_argument("closed form only for centred gaussian");
    return std::pow(g->stddev, p) * std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) /
           std::sqrt(std::numbers::pi);
  }
  if (const auto* e = std::get_if<Exponential>(&fam)) return std::pow(e->mean, p) * std::tgamma(p + 1.0);
  if (const auto* par = std::get_if<Pareto>(&fam)) {
    return par->shape * std::pow(par->scale, p) / (par->shape - p);
  }
  if (const auto* l = std::get_if<Lognormal>(&fam)) return std::exp(p * l->mu + 0.5 * p * p * l->sigma * l->sigma);
  const auto& t = std::get<StudentT>(fam);
  const double nu = t.dof;
  return std::pow(t.scale, p) * std::pow(nu, p / 2.0) * std::tgamma((p + 1.0) / 2.0) *
         std::tgamma((nu - p) / 2.0) / (std::sqrt(std::numbers::pi) * std::tgamma(nu / 2.0));
}

}  // namespace oracle
