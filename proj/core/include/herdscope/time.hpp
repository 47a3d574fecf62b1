#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "herdscope/types.hpp"

namespace herdscope {

/// Parses integer epoch seconds or an RFC 3339 timestamp
/// (`YYYY-MM-DDTHH:MM:SS[.frac](Z|+hh:mm|-hh:mm)`). Fractional seconds are
/// floored to whole seconds.
std::optional<Instant> parse_instant(std::string_view text);

/// RFC 3339 in UTC, e.g. `2007-03-01T12:00:00Z`.
std::string format_instant(Instant t);

/// Calendar year (UTC) of an instant.
int year_of(Instant t);

}  // namespace herdscope
