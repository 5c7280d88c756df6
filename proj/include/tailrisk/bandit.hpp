#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tailrisk/bounds.hpp"
#include "tailrisk/distributions.hpp"
#include "tailrisk/estimators.hpp"
#include "tailrisk/random.hpp"

namespace tailrisk {

/// K >= 2 arms compared by CVaR at a common level. Arms are indexed from 0.
class BanditEnv {
 public:
  BanditEnv(std::vector<DistributionSpec> arms, RiskLevel alpha);

  std::span<const DistributionSpec> arms() const noexcept { return arms_; }
  std::size_t size() const noexcept { return arms_.size(); }
  RiskLevel alpha() const noexcept { return alpha_; }

  std::vector<double> true_cvars() const;
  /// argmin of the true CVaRs, lowest index on ties.
  std::size_t best_arm() const;

 private:
  std::vector<DistributionSpec> arms_;
  RiskLevel alpha_;
};

struct SRSchedule {
  double log_bar_K = 0.0;
  /// cumulative[k] = n_k for k = 0..K-1, with cumulative[0] = 0.
  std::vector<std::size_t> cumulative;

  std::size_t phases() const noexcept { return cumulative.empty() ? 0 : cumulative.size() - 1; }
  /// sum_k (K + 1 - k) (n_k - n_{k-1}).
  std::size_t total_pulls() const noexcept;
};

/// 1/2 + sum_{i=2}^K 1/i.
double log_bar(std::size_t K);

/// n_k = ceil((n - K) / (log_bar(K) (K + 1 - k))) for k = 1..K-1, computed
/// in exact rational arithmetic so the ceiling never overshoots the budget.
SRSchedule sr_schedule(std::size_t K, std::size_t n);

/// As above, but also rejects budgets whose first phase leaves the CVaR
/// estimator undefined (floor(n_1 (1 - alpha)) = 0).
SRSchedule sr_schedule(std::size_t K, std::size_t n, RiskLevel alpha);

struct Elimination {
  std::size_t phase = 0;  // 1-based phase number
  std::size_t arm = 0;
  double cvar_estimate = 0.0;
  friend bool operator==(const Elimination&, const Elimination&) = default;
};

struct BanditRun {
  std::size_t recommendation = 0;
  std::vector<std::size_t> pulls_per_arm;
  std::vector<Elimination> eliminations;
  /// Final CVaR estimate of every arm (at its last pull count).
  std::vector<double> final_estimates;
  std::size_t total_pulls = 0;
  friend bool operator==(const BanditRun&, const BanditRun&) = default;
};

/// One independent stream per arm, derived from (seed, arm index).
std::vector<RandomStream> arm_streams(std::uint64_t seed, std::size_t K);

/// Successive rejects on empirical (or truncated) CVaR: K-1 phases, each
/// topping every surviving arm up to n_k samples and dropping the arm with
/// the highest estimate (lowest index on ties).
BanditRun run_cvar_sr(const BanditEnv& env, std::size_t budget, const EstimatorSpec& estimator,
                      std::uint64_t seed);
BanditRun run_cvar_sr(const BanditEnv& env, std::size_t budget, const EstimatorSpec& estimator,
                      std::vector<RandomStream> streams);

/// Pulls each arm floor(n/K) times and recommends the lowest estimate.
BanditRun run_uniform(const BanditEnv& env, std::size_t budget, const EstimatorSpec& estimator,
                      std::uint64_t seed);
BanditRun run_uniform(const BanditEnv& env, std::size_t budget, const EstimatorSpec& estimator,
                      std::vector<RandomStream> streams);

/// Gaps to the best arm, sorted ascending; the first entry is 0.
class GapProfile {
 public:
  explicit GapProfile(std::vector<double> sorted_gaps);
  static GapProfile from_cvars(std::span<const double> cvars);

  std::span<const double> gaps() const noexcept { return gaps_; }

 private:
  std::vector<double> gaps_;
};

/// max_i i / min{D_[i]/2, D_[i]^2/4} with the convention D_[1] := D_[2].
/// Infinite when the best arm is tied (D_[2] = 0) but some gap is positive.
double hardness_H(const GapProfile& profile);

/// min(1, 4K(K-1) exp(-(n-K)(1-alpha) G_max / (H log_bar(K)))).
double misid_upper_bound(std::size_t K, std::size_t n, RiskLevel alpha, double H, double G_max);

/// max_i constant_G(arm_i).
double g_max(std::span<const LightBoundParams> arms);

}  // namespace tailrisk
