#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "herdscope/metrics_config.hpp"

namespace herdscope {

/// Result of the coefficient of herding. `value` is empty when the
/// coefficient is undefined for the sequence.
struct HerdingCoefficient {
  std::optional<double> value;
  /// Set only by the m_point variant, whose product is not bounded by 1.
  bool out_of_range = false;
  /// The value came from the saturate policy rather than a correlation.
  bool saturated = false;
};

/// Coefficient of herding over the ordered contribution amounts of one
/// listing, with memory range `config.memory_range` (m).
///
/// For lag l, rho_l is the Pearson correlation between (A_1..A_{N-l}) and
/// (A_{1+l}..A_N). lag_mean averages rho_1..rho_{m-1} over the defined lags;
/// endpoint reports rho_{m-1}; m_point computes
///   (1/(N-m+1)) sum_i prod_k (A_{i+k-1} - mu_k) / prod_k sigma_k
/// over the m windows S_k = (A_k..A_{N-m+k}) with population deviations.
/// Undefined when N < m + 2.
HerdingCoefficient coefficient_of_herding(std::span<const double> amounts, const MetricsConfig& config);
HerdingCoefficient coefficient_of_herding(std::span<const std::int64_t> amounts_cents, const MetricsConfig& config);

}  // namespace herdscope
