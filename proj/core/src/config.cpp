#include "herdscope/config.hpp"

#include <fstream>
#include <istream>

#include "herdscope/error.hpp"
#include "numfmt.hpp"

namespace herdscope {

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = detail::trim(line);
    if (text.empty() || text == "\r") continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto key = detail::trim(text.substr(0, eq));
    auto value = detail::trim(text.substr(eq + 1));
    if (!value.empty() && value.back() == '\r') value.remove_suffix(1);
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.values_[std::string(key)] = std::string(value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in);
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

int parse_int_value(std::string_view key, std::string_view value) {
  auto v = detail::parse_int<int>(value);
  if (!v) throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(value) + "'");
  return *v;
}

double parse_real_value(std::string_view key, std::string_view value) {
  auto v = detail::parse_real(value);
  if (!v) throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  return *v;
}

MetricsConfig apply_metrics_config(const KeyValueConfig& kv, MetricsConfig base) {
  if (auto v = kv.get("memory_range")) base.memory_range = parse_int_value("memory_range", *v);
  if (auto v = kv.get("min_contributions")) base.min_contributions = parse_int_value("min_contributions", *v);
  if (auto v = kv.get("coh_variant")) {
    auto parsed = parse_coh_variant(*v);
    if (!parsed) throw ConfigError("coh_variant '" + *v + "' is not one of lag_mean, endpoint, m_point");
    base.coh_variant = *parsed;
  }
  if (auto v = kv.get("degenerate_policy")) {
    auto parsed = parse_degenerate_policy(*v);
    if (!parsed) throw ConfigError("degenerate_policy '" + *v + "' is not one of undefined, saturate");
    base.degenerate_policy = *parsed;
  }
  if (auto v = kv.get("prior_success_policy")) {
    auto parsed = parse_prior_success_policy(*v);
    if (!parsed) throw ConfigError("prior_success_policy '" + *v + "' is not one of lookahead, resolved_only");
    base.prior_success_policy = *parsed;
  }
  base.validate();
  return base;
}

KeyValueConfig to_key_values(const MetricsConfig& config) {
  KeyValueConfig kv;
  kv.set("memory_range", std::to_string(config.memory_range));
  kv.set("coh_variant", std::string(to_string(config.coh_variant)));
  kv.set("degenerate_policy", std::string(to_string(config.degenerate_policy)));
  kv.set("prior_success_policy", std::string(to_string(config.prior_success_policy)));
  kv.set("min_contributions", std::to_string(config.min_contributions));
  return kv;
}

}  // namespace herdscope
