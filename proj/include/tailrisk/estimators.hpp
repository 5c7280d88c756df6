#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tailrisk/distributions.hpp"

namespace tailrisk {

/// Samples in arrival order. Order matters: the truncated estimator's
/// clipping level depends on each sample's index.
class SampleBatch {
 public:
  explicit SampleBatch(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// Descending order statistics X_[1] >= X_[2] >= ... >= X_[n]. Indexing is
/// 1-based to match the usual order-statistic notation.
class OrderedView {
 public:
  explicit OrderedView(const SampleBatch& batch);

  double operator[](std::size_t rank) const;
  std::size_t size() const noexcept { return descending_.size(); }
  std::span<const double> descending() const noexcept { return descending_; }

 private:
  std::vector<double> descending_;
};

struct EmpiricalEstimator {
  friend bool operator==(const EmpiricalEstimator&, const EmpiricalEstimator&) = default;
};

struct TruncatedEstimator {
  double p = 2.0;
  double u = 1.0;
  double delta = 0.01;
  friend bool operator==(const TruncatedEstimator&, const TruncatedEstimator&) = default;
};

struct GaussianPluginEstimator {
  friend bool operator==(const GaussianPluginEstimator&, const GaussianPluginEstimator&) = default;
};

using EstimatorSpec = std::variant<EmpiricalEstimator, TruncatedEstimator, GaussianPluginEstimator>;

std::string estimator_name(const EstimatorSpec& spec);

struct RiskEstimate {
  double var_hat = 0.0;
  double cvar_hat = 0.0;
  std::size_t n = 0;
  EstimatorSpec estimator;
};

/// floor(n (1 - alpha)), the number of order statistics in the upper tail.
/// A product that lands within 1e-9 (relative) of an integer is snapped to
/// it, so alpha = 0.9 with n = 10 gives 1 rather than 0.
std::size_t tail_count(std::size_t n, RiskLevel level) noexcept;

/// (1/n) #{i : x_i <= x}.
double empirical_cdf(const SampleBatch& batch, double x);

/// The floor(n (1 - alpha))-th largest sample.
double empirical_var(const SampleBatch& batch, RiskLevel level);

/// (1 / (n (1 - alpha))) sum_i x_i 1{x_i >= var_hat}.
RiskEstimate empirical_cvar(const SampleBatch& batch, RiskLevel level);

/// B_i = (u i / log(1/delta))^(1/p), with i counted from 1.
double truncation_level(std::size_t i, double p, double u, double delta);

/// Empirical CVaR that drops the i-th sample when it exceeds B_i.
RiskEstimate truncated_cvar(const SampleBatch& batch, RiskLevel level,
                            const BoundedMoment& tail, double delta);

/// Gaussian plug-in: mean_hat + sd_hat * c_alpha(Z), unbiased variance.
RiskEstimate gaussian_plugin_cvar(const SampleBatch& batch, RiskLevel level);

RiskEstimate estimate(const SampleBatch& batch, RiskLevel level, const EstimatorSpec& spec);

/// Throws InvalidArgument when the estimator parameters are out of range
/// (p outside (1, 2], u <= 0) and InvalidDelta when delta is outside (0, 1).
void validate(const EstimatorSpec& spec);

}  // namespace tailrisk
