#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace agilelint {

/// A UTC instant with second precision.
struct Timestamp {
  std::int64_t seconds = 0;  // since 1970-01-01T00:00:00Z

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Accepts `YYYY-MM-DDTHH:MM:SS` followed by optional fractional seconds
/// (discarded) and a zone designator (`Z` or `+HH:MM` / `-HH:MM`). A missing
/// designator is read as UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Always renders UTC with a trailing `Z`.
std::string format_iso8601(Timestamp ts);

Timestamp timestamp_from_civil(int year, unsigned month, unsigned day, int hour = 0,
                               int minute = 0, int second = 0);

Timestamp now_utc();

}  // namespace agilelint
