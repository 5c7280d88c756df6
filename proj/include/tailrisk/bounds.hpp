#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "tailrisk/distributions.hpp"

namespace tailrisk {

enum class Regime { SmallEpsilon, LargeEpsilon, NotApplicable };

std::string regime_name(Regime regime);

struct BoundValue {
  /// The bound clipped to [0, 1].
  double probability_bound = 1.0;
  Regime regime = Regime::NotApplicable;
  /// Natural log of the unclipped bound; stays finite where the bound
  /// itself underflows to zero.
  double log_bound = 0.0;
};

/// P(|v_hat - v| >= eps) <= 2 exp(-2 n c eps^2).
struct VarBoundParams {
  double c = 1.0;
};

/// Light-tailed CVaR bound. sigma and b are the MGF parameters of the
/// distribution, v_alpha its VaR and c the distribution-dependent constant.
struct LightBoundParams {
  double sigma = 1.0;
  double b = 1.0;
  double v_alpha = 0.0;
  double c = 1.0;
  RiskLevel alpha{0.95};

  /// (sigma^2 + v_alpha^2) / (b (1 - alpha)); eps at or below it uses the
  /// sub-Gaussian branch.
  double threshold() const noexcept;
};

/// Bounded p-th moment CVaR bound. c is c' when p = 2.
struct HeavyBoundParams {
  double p = 2.0;
  double c = 1.0;
  RiskLevel alpha{0.95};
};

/// 8 exp(-n (1 - alpha) min(eps, eps^2) G).
struct SimplifiedBoundParams {
  RiskLevel alpha{0.95};
  double G = 1.0;
};

using BoundSpec = std::variant<VarBoundParams, LightBoundParams, HeavyBoundParams, SimplifiedBoundParams>;

BoundValue var_bound(std::size_t n, double eps, double c);
BoundValue cvar_bound_light(std::size_t n, double eps, const LightBoundParams& params);
BoundValue cvar_bound_heavy(std::size_t n, double eps, const HeavyBoundParams& params);
BoundValue simplified_light_bound(std::size_t n, double eps, RiskLevel alpha, double G);

BoundValue evaluate_bound(const BoundSpec& spec, std::size_t n, double eps);

/// min{ c (1-alpha) / (2 (sigma^2 + v^2)), 1 / (4 b), c (1-alpha) }.
double constant_G(const LightBoundParams& params);

/// Smallest n with bound(n, eps) <= target_delta. A candidate comes from
/// solving the exponential in closed form; it is then corrected against the
/// evaluator itself so the round trip holds exactly. Comparisons against
/// target_delta are made in log space with a 1e-12 relative allowance.
std::size_t invert_for_n(double eps, double target_delta, const BoundSpec& spec);

/// Throws InvalidArgument for parameters outside the documented ranges.
void validate(const BoundSpec& spec);

}  // namespace tailrisk
