#include "tailrisk/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tailrisk/error.hpp"

namespace tailrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const double kLog2 = std::numbers::ln2;
const double kLog6 = std::log(6.0);
const double kLog8 = std::log(8.0);

// Largest budget invert_for_n will report.
constexpr std::size_t kMaxSamples = std::size_t{1} << 60;

BoundValue make_bound(double log_bound, Regime regime) {
  return {std::min(1.0, std::exp(log_bound)), regime, log_bound};
}

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_inputs(std::size_t n, double eps) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "n must be >= 1");
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "eps must be > 0");
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::SmallEpsilon: return "SmallEpsilon";
    case Regime::LargeEpsilon: return "LargeEpsilon";
    case Regime::NotApplicable: return "NotApplicable";
  }
  return "NotApplicable";
}

double LightBoundParams::threshold() const noexcept {
  return (sigma * sigma + v_alpha * v_alpha) / (b * alpha.tail_mass());
}

void validate(const BoundSpec& spec) {
  std::visit(overloaded{
                 [](const VarBoundParams& p) { require(p.c > 0.0, "c must be > 0"); },
                 [](const LightBoundParams& p) {
                   require(p.sigma >= 0.0 && std::isfinite(p.sigma), "sigma must be >= 0");
                   require(p.b > 0.0 && std::isfinite(p.b), "b must be > 0");
                   require(std::isfinite(p.v_alpha), "v_alpha must be finite");
                   require(p.c > 0.0, "c must be > 0");
                   require(p.sigma * p.sigma + p.v_alpha * p.v_alpha > 0.0,
                           "sigma^2 + v_alpha^2 must be > 0");
                 },
                 [](const HeavyBoundParams& p) {
                   require(p.p > 1.0 && p.p <= 2.0, "p must lie in (1, 2]");
                   require(p.c > 0.0, "c must be > 0");
                 },
                 [](const SimplifiedBoundParams& p) { require(p.G > 0.0, "G must be > 0"); },
             },
             spec);
}

BoundValue var_bound(std::size_t n, double eps, double c) {
  check_inputs(n, eps);
  validate(VarBoundParams{c});
  return make_bound(kLog2 - 2.0 * static_cast<double>(n) * c * eps * eps, Regime::NotApplicable);
}

BoundValue cvar_bound_light(std::size_t n, double eps, const LightBoundParams& params) {
  check_inputs(n, eps);
  validate(params);
  const double nn = static_cast<double>(n);
  const double tail = params.alpha.tail_mass();
  const double spread = params.sigma * params.sigma + params.v_alpha * params.v_alpha;
  const double quad = params.c * nn * eps * eps * tail * tail;
  if (eps <= params.threshold()) {
    return make_bound(kLog6 - quad / (2.0 * spread), Regime::SmallEpsilon);
  }
  const double linear_term = kLog2 - nn * eps * tail / (4.0 * params.b);
  return make_bound(log_sum_exp(linear_term, kLog6 - quad), Regime::LargeEpsilon);
}

BoundValue cvar_bound_heavy(std::size_t n, double eps, const HeavyBoundParams& params) {
  check_inputs(n, eps);
  validate(params);
  const double nn = static_cast<double>(n);
  const double scaled = params.alpha.tail_mass() * eps;
  // p = 2 is case (ii); its exponent is the p -> 2 limit of case (i).
  const double power = params.p == 2.0 ? 2.0 : params.p / (params.p - 1.0);
  return make_bound(kLog8 - params.c * nn * std::pow(scaled, power), Regime::NotApplicable);
}

BoundValue simplified_light_bound(std::size_t n, double eps, RiskLevel alpha, double G) {
  check_inputs(n, eps);
  validate(SimplifiedBoundParams{alpha, G});
  const double rate = alpha.tail_mass() * std::min(eps, eps * eps) * G;
  return make_bound(kLog8 - static_cast<double>(n) * rate, Regime::NotApplicable);
}

BoundValue evaluate_bound(const BoundSpec& spec, std::size_t n, double eps) {
  return std::visit(overloaded{
                        [&](const VarBoundParams& p) { return var_bound(n, eps, p.c); },
                        [&](const LightBoundParams& p) { return cvar_bound_light(n, eps, p); },
                        [&](const HeavyBoundParams& p) { return cvar_bound_heavy(n, eps, p); },
                        [&](const SimplifiedBoundParams& p) {
                          return simplified_light_bound(n, eps, p.alpha, p.G);
                        },
                    },
                    spec);
}

double constant_G(const LightBoundParams& params) {
  validate(params);
  const double tail = params.alpha.tail_mass();
  const double spread = params.sigma * params.sigma + params.v_alpha * params.v_alpha;
  return std::min({params.c * tail / (2.0 * spread), 1.0 / (4.0 * params.b), params.c * tail});
}

std::size_t invert_for_n(double eps, double target_delta, const BoundSpec& spec) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "eps must be > 0");
  if (!(target_delta > 0.0)) fail(ErrorKind::InvalidArgument, "target delta must be > 0");
  validate(spec);
  if (target_delta >= 1.0) return 1;

  const double log_target = std::log(target_delta);
  const double allowance = 1e-12 * std::max(1.0, std::abs(log_target));
  auto satisfied = [&](std::size_t n) {
    return evaluate_bound(spec, n, eps).log_bound <= log_target + allowance;
  };

  // Every form is A - n r (or a sum of two such terms); solve for n.
  auto solve = [&](double log_coef, double rate) {
    return (log_coef - log_target) / rate;
  };
  const double candidate = std::visit(
      overloaded{
          [&](const VarBoundParams& p) { return solve(kLog2, 2.0 * p.c * eps * eps); },
          [&](const LightBoundParams& p) {
            const double tail = p.alpha.tail_mass();
            const double spread = p.sigma * p.sigma + p.v_alpha * p.v_alpha;
            const double quad_rate = p.c * eps * eps * tail * tail;
            if (eps <= p.threshold()) return solve(kLog6, quad_rate / (2.0 * spread));
            // Two terms: requiring each to be at most delta/2 gives an upper bracket.
            return std::max(solve(kLog2 + kLog2, eps * tail / (4.0 * p.b)),
                            solve(kLog6 + kLog2, quad_rate));
          },
          [&](const HeavyBoundParams& p) {
            const double power = p.p == 2.0 ? 2.0 : p.p / (p.p - 1.0);
            return solve(kLog8, p.c * std::pow(p.alpha.tail_mass() * eps, power));
          },
          [&](const SimplifiedBoundParams& p) {
            return solve(kLog8, p.alpha.tail_mass() * std::min(eps, eps * eps) * p.G);
          },
      },
      spec);

  if (!std::isfinite(candidate) || candidate >= static_cast<double>(kMaxSamples)) {
    fail(ErrorKind::Unachievable, "bound cannot reach the target delta at any representable n");
  }
  std::size_t hi = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::max(candidate, 1.0))));
  while (!satisfied(hi)) {
    if (hi >= kMaxSamples) fail(ErrorKind::Unachievable, "bound does not fall below the target delta");
    hi *= 2;
  }
  // Smallest satisfying n in [1, hi].
  std::size_t lo = 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (satisfied(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace tailrisk
