#include "herdscope/metrics_config.hpp"

#include "herdscope/error.hpp"

namespace herdscope {

void MetricsConfig::validate() const {
  if (memory_range < 2) throw ConfigError("memory_range must be >= 2");
  if (min_contributions < 2) throw ConfigError("min_contributions must be >= 2");
}

std::string_view to_string(CohVariant v) {
  switch (v) {
    case CohVariant::lag_mean: return "lag_mean";
    case CohVariant::endpoint: return "endpoint";
    case CohVariant::m_point: return "m_point";
  }
  return "lag_mean";
}

std::string_view to_string(DegeneratePolicy p) { return p == DegeneratePolicy::saturate ? "saturate" : "undefined"; }

std::string_view to_string(PriorSuccessPolicy p) {
  return p == PriorSuccessPolicy::resolved_only ? "resolved_only" : "lookahead";
}

std::optional<CohVariant> parse_coh_variant(std::string_view text) {
  if (text == "lag_mean") return CohVariant::lag_mean;
  if (text == "endpoint") return CohVariant::endpoint;
  if (text == "m_point") return CohVariant::m_point;
  return std::nullopt;
}

std::optional<DegeneratePolicy> parse_degenerate_policy(std::string_view text) {
  if (text == "undefined") return DegeneratePolicy::undefined;
  if (text == "saturate") return DegeneratePolicy::saturate;
  return std::nullopt;
}

std::optional<PriorSuccessPolicy> parse_prior_success_policy(std::string_view text) {
  if (text == "lookahead") return PriorSuccessPolicy::lookahead;
  if (text == "resolved_only") return PriorSuccessPolicy::resolved_only;
  return std::nullopt;
}

}  // namespace herdscope
