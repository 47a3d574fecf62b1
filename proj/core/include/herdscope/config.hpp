#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "herdscope/metrics_config.hpp"

namespace herdscope {

/// `key = value` text config. Blank lines and `#` comments are ignored;
/// a repeated key keeps the last value.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view key) const;
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

/// Keys understood by apply_metrics_config.
inline constexpr std::string_view kMetricsConfigKeys[] = {"memory_range", "coh_variant", "degenerate_policy",
                                                          "prior_success_policy", "min_contributions"};

/// Overlays the metrics keys present in `kv` onto `base`. Throws
/// ConfigError for malformed values.
MetricsConfig apply_metrics_config(const KeyValueConfig& kv, MetricsConfig base = {});

/// Inverse of apply_metrics_config, used for manifests.
KeyValueConfig to_key_values(const MetricsConfig& config);

int parse_int_value(std::string_view key, std::string_view value);
double parse_real_value(std::string_view key, std::string_view value);

}  // namespace herdscope
