#include "herdscope/herding.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "herdscope/stats.hpp"

namespace herdscope {
namespace {

// Pearson of the lag-l windows (A_1..A_{N-l}) and (A_{1+l}..A_N).
std::optional<double> lag_correlation(std::span<const double> a, std::size_t lag) {
  const std::size_t len = a.size() - lag;
  return pearson(a.subspan(0, len), a.subspan(lag, len));
}

// Both lag windows constant and elementwise equal to each other.
bool lag_windows_constant_equal(std::span<const double> a, std::size_t lag) {
  const std::size_t len = a.size() - lag;
  const double v = a[0];
  for (std::size_t i = 0; i < len; ++i) {
    if (a[i] != v || a[i + lag] != v) return false;
  }
  return true;
}

HerdingCoefficient saturate_or_undefined(bool all_constant_equal, const MetricsConfig& config) {
  HerdingCoefficient out;
  if (config.degenerate_policy == DegeneratePolicy::saturate && all_constant_equal) {
    out.value = 1.0;
    out.saturated = true;
  }
  return out;
}

HerdingCoefficient lag_mean(std::span<const double> a, const MetricsConfig& config) {
  const auto m = static_cast<std::size_t>(config.memory_range);
  double sum = 0.0;
  std::size_t defined = 0;
  bool excluded_all_constant = true;
  for (std::size_t lag = 1; lag < m; ++lag) {
    if (auto r = lag_correlation(a, lag)) {
      sum += *r;
      ++defined;
    } else if (!lag_windows_constant_equal(a, lag)) {
      excluded_all_constant = false;
    }
  }
  if (defined == 0) return saturate_or_undefined(excluded_all_constant, config);
  return {std::clamp(sum / static_cast<double>(defined), -1.0, 1.0)};
}

HerdingCoefficient endpoint(std::span<const double> a, const MetricsConfig& config) {
  const auto lag = static_cast<std::size_t>(config.memory_range - 1);
  if (auto r = lag_correlation(a, lag)) return {*r};
  return saturate_or_undefined(lag_windows_constant_equal(a, lag), config);
}

HerdingCoefficient m_point(std::span<const double> a, const MetricsConfig& config) {
  const auto m = static_cast<std::size_t>(config.memory_range);
  const std::size_t len = a.size() - m + 1;
  std::vector<long double> mu(m, 0), sigma(m, 0);
  bool any_zero = false;
  for (std::size_t k = 0; k < m; ++k) {
    long double s = 0;
    for (std::size_t i = 0; i < len; ++i) s += a[k + i];
    mu[k] = s / static_cast<long double>(len);
    long double ss = 0;
    for (std::size_t i = 0; i < len; ++i) ss += (a[k + i] - mu[k]) * (a[k + i] - mu[k]);
    sigma[k] = std::sqrt(ss / static_cast<long double>(len));
    if (sigma[k] == 0) any_zero = true;
  }
  if (any_zero) {
    const bool constant = std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; });
    return saturate_or_undefined(constant, config);
  }
  long double total = 0;
  for (std::size_t i = 0; i < len; ++i) {
    long double prod = 1;
    for (std::size_t k = 0; k < m; ++k) prod *= (a[i + k] - mu[k]) / sigma[k];
    total += prod;
  }
  HerdingCoefficient out;
  out.value = static_cast<double>(total / static_cast<long double>(len));
  out.out_of_range = *out.value < -1.0 || *out.value > 1.0;
  return out;
}

}  // namespace

HerdingCoefficient coefficient_of_herding(std::span<const double> amounts, const MetricsConfig& config) {
  config.validate();
  const auto m = static_cast<std::size_t>(config.memory_range);
  if (amounts.size() < m + 2) return {};
  switch (config.coh_variant) {
    case CohVariant::lag_mean: return lag_mean(amounts, config);
    case CohVariant::endpoint: return endpoint(amounts, config);
    case CohVariant::m_point: return m_point(amounts, config);
  }
  return {};
}

HerdingCoefficient coefficient_of_herding(std::span<const std::int64_t> amounts_cents, const MetricsConfig& config) {
  std::vector<double> a(amounts_cents.begin(), amounts_cents.end());
  return coefficient_of_herding(std::span<const double>(a), config);
}

}  // namespace herdscope
