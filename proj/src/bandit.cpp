#include "tailrisk/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "tailrisk/error.hpp"

namespace tailrisk {

namespace {

__extension__ typedef unsigned __int128 u128;

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// log_bar(K) as an exact fraction num/den, when it fits in 128 bits with
// enough headroom to multiply by a budget.
bool log_bar_fraction(std::size_t K, u128& num, u128& den) {
  constexpr u128 kLimit = static_cast<u128>(1) << 100;
  den = 2;
  for (std::size_t i = 3; i <= K; ++i) {
    den = den / gcd128(den, i) * i;
    if (den > kLimit) return false;
  }
  num = den / 2;
  for (std::size_t i = 2; i <= K; ++i) num += den / i;
  return num <= kLimit;
}

std::size_t ceil_div(u128 a, u128 b) { return static_cast<std::size_t>((a + b - 1) / b); }

void check_feasible(const SRSchedule& schedule, RiskLevel alpha) {
  if (tail_count(schedule.cumulative.at(1), alpha) == 0) {
    fail(ErrorKind::BudgetTooSmall,
         "first phase gives " + std::to_string(schedule.cumulative[1]) +
             " samples per arm, too few for a CVaR estimate at alpha = " + std::to_string(alpha.value()));
  }
}

std::vector<Sampler> make_samplers(const BanditEnv& env, std::vector<RandomStream> streams) {
  if (streams.size() != env.size()) fail(ErrorKind::InvalidArgument, "need one random stream per arm");
  std::vector<Sampler> samplers;
  samplers.reserve(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) samplers.emplace_back(env.arms()[i], std::move(streams[i]));
  return samplers;
}

double cvar_estimate(const std::vector<double>& samples, RiskLevel alpha, const EstimatorSpec& estimator) {
  return estimate(SampleBatch(samples), alpha, estimator).cvar_hat;
}

}  // namespace

BanditEnv::BanditEnv(std::vector<DistributionSpec> arms, RiskLevel alpha)
    : arms_(std::move(arms)), alpha_(alpha) {
  if (arms_.size() < 2) fail(ErrorKind::InvalidArgument, "a bandit needs at least two arms");
}

std::vector<double> BanditEnv::true_cvars() const {
  std::vector<double> out;
  out.reserve(arms_.size());
  for (const auto& arm : arms_) out.push_back(true_cvar(arm, alpha_));
  return out;
}

std::size_t BanditEnv::best_arm() const {
  const auto cvars = true_cvars();
  return static_cast<std::size_t>(std::min_element(cvars.begin(), cvars.end()) - cvars.begin());
}

std::size_t SRSchedule::total_pulls() const noexcept {
  const std::size_t K = cumulative.size();
  std::size_t total = 0;
  for (std::size_t k = 1; k < K; ++k) total += (K + 1 - k) * (cumulative[k] - cumulative[k - 1]);
  return total;
}

double log_bar(std::size_t K) {
  double sum = 0.5;
  for (std::size_t i = 2; i <= K; ++i) sum += 1.0 / static_cast<double>(i);
  return sum;
}

SRSchedule sr_schedule(std::size_t K, std::size_t n) {
  if (K < 2) fail(ErrorKind::InvalidArgument, "successive rejects needs K >= 2");
  if (n <= K) fail(ErrorKind::BudgetTooSmall, "budget must exceed the number of arms");

  SRSchedule schedule;
  schedule.log_bar_K = log_bar(K);
  schedule.cumulative.assign(K, 0);
  u128 num = 0;
  u128 den = 0;
  const bool exact = log_bar_fraction(K, num, den);
  const std::size_t spare = n - K;
  for (std::size_t k = 1; k < K; ++k) {
    const std::size_t arms_left = K + 1 - k;
    if (exact && spare < (std::size_t{1} << 26)) {
      // ceil(spare * den / (num * arms_left))
      schedule.cumulative[k] = ceil_div(static_cast<u128>(spare) * den, num * arms_left);
    } else {
      const long double x = static_cast<long double>(spare) /
                            (static_cast<long double>(schedule.log_bar_K) * arms_left);
      schedule.cumulative[k] = static_cast<std::size_t>(std::ceil(x - 1e-12L * x));
    }
  }
  return schedule;
}

SRSchedule sr_schedule(std::size_t K, std::size_t n, RiskLevel alpha) {
  SRSchedule schedule = sr_schedule(K, n);
  check_feasible(schedule, alpha);
  return schedule;
}

std::vector<RandomStream> arm_streams(std::uint64_t seed, std::size_t K) {
  std::vector<RandomStream> streams;
  streams.reserve(K);
  for (std::size_t i = 0; i < K; ++i) streams.push_back(RandomStream::derived(seed, {hash_label("arm"), i}));
  return streams;
}

BanditRun run_cvar_sr(const BanditEnv& env, std::size_t budget, const EstimatorSpec& estimator,
                      std::uint64_t seed) {
  return run_cvar_sr(env, budget, estimator, arm_streams(seed, env.size()));
}

BanditRun run_cvar_sr(const BanditEnv& env, std::size_t budget, const EstimatorSpec& estimator,
                      std::vector<RandomStream> streams) {
  validate(estimator);
  const std::size_t K = env.size();
  const SRSchedule schedule = sr_schedule(K, budget, env.alpha());
  auto samplers = make_samplers(env, std::move(streams));

  std::vector<std::vector<double>> samples(K);
  std::vector<std::size_t> active(K);
  std::iota(active.begin(), active.end(), std::size_t{0});

  BanditRun run;
  run.final_estimates.assign(K, 0.0);
  for (std::size_t k = 1; k < K; ++k) {
    const std::size_t fresh = schedule.cumulative[k] - schedule.cumulative[k - 1];
    for (std::size_t arm : active) {
      samplers[arm].fill(samples[arm], fresh);
      run.final_estimates[arm] = cvar_estimate(samples[arm], env.alpha(), estimator);
    }
    // `active` stays sorted, so a strict comparison keeps the lowest index on ties.
    auto worst = active.begin();
    for (auto it = active.begin(); it != active.end(); ++it) {
      if (run.final_estimates[*it] > run.final_estimates[*worst]) worst = it;
    }
    run.eliminations.push_back({k, *worst, run.final_estimates[*worst]});
    active.erase(worst);
  }

  run.recommendation = active.front();
  run.pulls_per_arm.reserve(K);
  for (const auto& s : samples) run.pulls_per_arm.push_back(s.size());
  run.total_pulls = std::accumulate(run.pulls_per_arm.begin(), run.pulls_per_arm.end(), std::size_t{0});
  return run;
}

BanditRun run_uniform(const BanditEnv& env, std::size_t budget, const EstimatorSpec& estimator,
                      std::uint64_t seed) {
  return run_uniform(env, budget, estimator, arm_streams(seed, env.size()));
}

BanditRun run_uniform(const BanditEnv& env, std::size_t budget, const EstimatorSpec& estimator,
                      std::vector<RandomStream> streams) {
  validate(estimator);
  const std::size_t K = env.size();
  if (budget < K) fail(ErrorKind::BudgetTooSmall, "budget is smaller than the number of arms");
  const std::size_t per_arm = budget / K;
  if (tail_count(per_arm, env.alpha()) == 0) {
    fail(ErrorKind::BudgetTooSmall, "per-arm sample count too small for a CVaR estimate");
  }
  auto samplers = make_samplers(env, std::move(streams));

  BanditRun run;
  run.final_estimates.assign(K, 0.0);
  run.pulls_per_arm.assign(K, per_arm);
  for (std::size_t arm = 0; arm < K; ++arm) {
    std::vector<double> samples;
    samplers[arm].fill(samples, per_arm);
    run.final_estimates[arm] = cvar_estimate(samples, env.alpha(), estimator);
  }
  run.recommendation = static_cast<std::size_t>(
      std::min_element(run.final_estimates.begin(), run.final_estimates.end()) - run.final_estimates.begin());
  run.total_pulls = per_arm * K;
  return run;
}

GapProfile::GapProfile(std::vector<double> sorted_gaps) : gaps_(std::move(sorted_gaps)) {
  if (gaps_.empty()) fail(ErrorKind::InvalidArgument, "gap profile is empty");
  if (gaps_.front() != 0.0) fail(ErrorKind::InvalidArgument, "smallest gap must be 0");
  for (std::size_t i = 1; i < gaps_.size(); ++i) {
    if (!(gaps_[i] >= gaps_[i - 1]) || !std::isfinite(gaps_[i])) {
      fail(ErrorKind::InvalidArgument, "gaps must be finite and non-decreasing");
    }
  }
}

GapProfile GapProfile::from_cvars(std::span<const double> cvars) {
  if (cvars.empty()) fail(ErrorKind::InvalidArgument, "no arms");
  const double best = *std::min_element(cvars.begin(), cvars.end());
  std::vector<double> gaps;
  gaps.reserve(cvars.size());
  for (double c : cvars) gaps.push_back(c - best);
  std::sort(gaps.begin(), gaps.end());
  return GapProfile(std::move(gaps));
}

double hardness_H(const GapProfile& profile) {
  const auto gaps = profile.gaps();
  if (gaps.back() == 0.0) fail(ErrorKind::DegenerateGaps, "all gaps are zero");
  double H = 0.0;
  for (std::size_t i = 1; i <= gaps.size(); ++i) {
    const double gap = i == 1 ? gaps[1] : gaps[i - 1];
    if (gap == 0.0) return std::numeric_limits<double>::infinity();
    H = std::max(H, static_cast<double>(i) / std::min(gap / 2.0, gap * gap / 4.0));
  }
  return H;
}

double misid_upper_bound(std::size_t K, std::size_t n, RiskLevel alpha, double H, double G_max) {
  if (K < 2) fail(ErrorKind::InvalidArgument, "K must be >= 2");
  if (n <= K) fail(ErrorKind::InvalidArgument, "budget must exceed K");
  if (!(H > 0.0)) fail(ErrorKind::InvalidArgument, "H must be > 0");
  if (!(G_max > 0.0)) fail(ErrorKind::InvalidArgument, "G_max must be > 0");
  const double k = static_cast<double>(K);
  const double exponent =
      static_cast<double>(n - K) * alpha.tail_mass() * G_max / (H * log_bar(K));
  return std::min(1.0, std::exp(std::log(4.0 * k * (k - 1.0)) - exponent));
}

double g_max(std::span<const LightBoundParams> arms) {
  if (arms.empty()) fail(ErrorKind::InvalidArgument, "no arms");
  double best = 0.0;
  for (const auto& arm : arms) best = std::max(best, constant_G(arm));
  return best;
}

}  // namespace tailrisk
