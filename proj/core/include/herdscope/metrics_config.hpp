#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace herdscope {

/// How the lagged window correlations are combined into one coefficient.
enum class CohVariant {
  lag_mean,  ///< mean of lag-1..lag-(m-1) Pearson correlations
  endpoint,  ///< the single lag-(m-1) correlation
  m_point,   ///< normalized m-way product over all m shifted windows
};

enum class DegeneratePolicy { undefined, saturate };

/// Which of a lender's earlier listings count toward prior success.
enum class PriorSuccessPolicy {
  lookahead,      ///< every earlier listing, scored by its final outcome
  resolved_only,  ///< only listings whose outcome resolved before the decision
};

struct MetricsConfig {
  int memory_range = 5;
  CohVariant coh_variant = CohVariant::lag_mean;
  DegeneratePolicy degenerate_policy = DegeneratePolicy::undefined;
  PriorSuccessPolicy prior_success_policy = PriorSuccessPolicy::lookahead;
  int min_contributions = 2;

  /// Throws ConfigError when memory_range < 2 or min_contributions < 2.
  void validate() const;
};

std::string_view to_string(CohVariant v);
std::string_view to_string(DegeneratePolicy p);
std::string_view to_string(PriorSuccessPolicy p);
std::optional<CohVariant> parse_coh_variant(std::string_view text);
std::optional<DegeneratePolicy> parse_degenerate_policy(std::string_view text);
std::optional<PriorSuccessPolicy> parse_prior_success_policy(std::string_view text);

}  // namespace herdscope
