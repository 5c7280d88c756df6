#include "tailrisk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "tailrisk/error.hpp"

namespace tailrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t require_tail(std::size_t n, RiskLevel level) {
  const std::size_t k = tail_count(n, level);
  if (k == 0) {
    fail(ErrorKind::InsufficientSamples,
         "floor(n (1 - alpha)) is zero: " + std::to_string(n) + " samples are too few for alpha = " +
             std::to_string(level.value()));
  }
  return k;
}

// k-th largest value (k >= 1). nth_element picks the same value a stable
// descending sort would put at rank k.
double kth_largest(std::span<const double> values, std::size_t k) {
  std::vector<double> scratch(values.begin(), values.end());
  auto it = scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(scratch.begin(), it, scratch.end(), std::greater<>());
  return *it;
}

}  // namespace

SampleBatch::SampleBatch(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorKind::InsufficientSamples, "sample batch is empty");
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "sample batch holds a non-finite value");
  }
}

OrderedView::OrderedView(const SampleBatch& batch)
    : descending_(batch.values().begin(), batch.values().end()) {
  std::stable_sort(descending_.begin(), descending_.end(), std::greater<>());
}

double OrderedView::operator[](std::size_t rank) const {
  if (rank == 0 || rank > descending_.size()) {
    fail(ErrorKind::InvalidArgument, "order statistic rank out of range");
  }
  return descending_[rank - 1];
}

std::string estimator_name(const EstimatorSpec& spec) {
  return std::visit(overloaded{
                        [](const EmpiricalEstimator&) { return std::string("empirical"); },
                        [](const TruncatedEstimator&) { return std::string("truncated"); },
                        [](const GaussianPluginEstimator&) { return std::string("gaussian-plugin"); },
                    },
                    spec);
}

std::size_t tail_count(std::size_t n, RiskLevel level) noexcept {
  const double x = static_cast<double>(n) * level.tail_mass();
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(x));
}

double empirical_cdf(const SampleBatch& batch, double x) {
  const auto values = batch.values();
  const auto count = std::count_if(values.begin(), values.end(), [x](double v) { return v <= x; });
  return static_cast<double>(count) / static_cast<double>(values.size());
}

double empirical_var(const SampleBatch& batch, RiskLevel level) {
  return kth_largest(batch.values(), require_tail(batch.size(), level));
}

RiskEstimate empirical_cvar(const SampleBatch& batch, RiskLevel level) {
  const double var_hat = empirical_var(batch, level);
  double sum = 0.0;
  for (double v : batch.values()) {
    if (v >= var_hat) sum += v;
  }
  const double n = static_cast<double>(batch.size());
  return {var_hat, sum / (n * level.tail_mass()), batch.size(), EmpiricalEstimator{}};
}

double truncation_level(std::size_t i, double p, double u, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::InvalidDelta, "delta must lie in (0, 1)");
  if (i == 0) fail(ErrorKind::InvalidArgument, "truncation index starts at 1");
  if (!(p > 1.0 && p <= 2.0)) fail(ErrorKind::InvalidArgument, "p must lie in (1, 2]");
  if (!(u > 0.0)) fail(ErrorKind::InvalidArgument, "u must be > 0");
  return std::pow(u * static_cast<double>(i) / std::log(1.0 / delta), 1.0 / p);
}

RiskEstimate truncated_cvar(const SampleBatch& batch, RiskLevel level,
                            const BoundedMoment& tail, double delta) {
  const TruncatedEstimator spec{tail.p, tail.u, delta};
  validate(spec);
  const double var_hat = empirical_var(batch, level);
  const auto values = batch.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i];
    if (x >= var_hat && x <= truncation_level(i + 1, tail.p, tail.u, delta)) sum += x;
  }
  const double n = static_cast<double>(values.size());
  return {var_hat, sum / (n * level.tail_mass()), values.size(), spec};
}

RiskEstimate gaussian_plugin_cvar(const SampleBatch& batch, RiskLevel level) {
  const auto values = batch.values();
  if (values.size() < 2) {
    fail(ErrorKind::InsufficientSamples, "gaussian plug-in needs at least two samples");
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean + sd * normal_quantile(level.value()), mean + sd * standard_normal_cvar(level),
          values.size(), GaussianPluginEstimator{}};
}

RiskEstimate estimate(const SampleBatch& batch, RiskLevel level, const EstimatorSpec& spec) {
  return std::visit(
      overloaded{
          [&](const EmpiricalEstimator&) { return empirical_cvar(batch, level); },
          [&](const TruncatedEstimator& t) {
            return truncated_cvar(batch, level, BoundedMoment{t.p, t.u}, t.delta);
          },
          [&](const GaussianPluginEstimator&) { return gaussian_plugin_cvar(batch, level); },
      },
      spec);
}

void validate(const EstimatorSpec& spec) {
  if (const auto* t = std::get_if<TruncatedEstimator>(&spec)) {
    if (!(t->p > 1.0 && t->p <= 2.0)) fail(ErrorKind::InvalidArgument, "p must lie in (1, 2]");
    if (!(t->u > 0.0 && std::isfinite(t->u))) fail(ErrorKind::InvalidArgument, "u must be > 0");
    if (!(t->delta > 0.0 && t->delta < 1.0)) fail(ErrorKind::InvalidDelta, "delta must lie in (0, 1)");
  }
}

}  // namespace tailrisk
