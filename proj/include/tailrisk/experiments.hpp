#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tailrisk/bandit.hpp"
#include "tailrisk/bounds.hpp"
#include "tailrisk/distributions.hpp"
#include "tailrisk/estimators.hpp"

namespace tailrisk {

/// Distribution-dependent constants feeding the theory columns. They are
/// free parameters; nothing here claims the resulting bound dominates the
/// measured probability.
struct BoundConstants {
  double c = 1.0;
};

struct DeviationConfig {
  std::string name = "deviation";
  DistributionSpec dist = DistributionSpec::gaussian(0.0, 1.0);
  RiskLevel alpha{0.95};
  EstimatorSpec estimator = EmpiricalEstimator{};
  double epsilon = 0.1;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  BoundConstants constants;
};

struct TailPoint {
  std::size_t n = 0;
  double empirical_prob = 0.0;
  double theoretical_bound = 1.0;
  std::size_t reps = 0;
  friend bool operator==(const TailPoint&, const TailPoint&) = default;
};

struct TailCurve {
  std::vector<TailPoint> points;
  friend bool operator==(const TailCurve&, const TailCurve&) = default;
};

struct MisidConfig {
  std::string name = "misid";
  std::vector<DistributionSpec> arms;
  RiskLevel alpha{0.9};
  std::vector<std::size_t> budgets;
  EstimatorSpec estimator = EmpiricalEstimator{};
  std::size_t reps = 1;
  std::uint64_t seed = 0;
  /// Taken from the true CVaR gaps when absent.
  std::optional<double> H;
  double G_max = 1.0;
};

struct ErrorPoint {
  std::size_t budget = 0;
  double misid_rate = 0.0;
  double theory_bound = 1.0;
  std::size_t reps = 0;
  friend bool operator==(const ErrorPoint&, const ErrorPoint&) = default;
};

struct ErrorCurve {
  std::vector<ErrorPoint> points;
  friend bool operator==(const ErrorCurve&, const ErrorCurve&) = default;
};

/// Worker count: an explicit request wins, then TAILRISK_THREADS, then the
/// hardware concurrency. Always at least 1.
std::size_t resolve_threads(std::optional<std::size_t> requested = std::nullopt);

/// Raw per-replication outcomes of a deviation sweep, grid-major. Exposed
/// for checks that need more than the aggregated probabilities.
std::vector<double> deviation_estimates(const DeviationConfig& cfg, std::size_t threads = 1);

/// Fraction of replications with |c_hat - c_alpha| > epsilon at every grid n.
/// Each replication draws from its own stream derived from (seed, name,
/// grid index, replication index), so the curve does not depend on the
/// thread count.
TailCurve deviation_curve(const DeviationConfig& cfg, std::size_t threads = 1);

/// The bounds-module evaluator matching the estimator and the tail class of
/// the distribution.
BoundSpec theory_bound_for(const DeviationConfig& cfg);

ErrorCurve misid_curve(const MisidConfig& cfg, std::size_t threads = 1);

struct DecayFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log(prob) on n. Probabilities of exactly 0 or 1 are
/// replaced by (count + 1) / (reps + 2) first. Needs at least 3 points.
DecayFit fit_decay_rate(const TailCurve& curve);

enum class ResultFormat { Csv, Json };

void write_results(const TailCurve& curve, const std::filesystem::path& path, ResultFormat format);
void write_results(const ErrorCurve& curve, const std::filesystem::path& path, ResultFormat format);

TailCurve read_tail_curve(const std::filesystem::path& path, ResultFormat format);
ErrorCurve read_error_curve(const std::filesystem::path& path, ResultFormat format);

}  // namespace tailrisk
