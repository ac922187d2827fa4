#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace procsim {

// All timestamps are UTC with one-second resolution.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

// Accepts "YYYY-MM-DD", "YYYY-MM-DD[T ]HH:MM[:SS[.fff]]" with an optional
// "Z" or "+HH[:MM]" / "-HH[:MM]" suffix. Fractional seconds are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);

inline std::int64_t epoch_seconds(Timestamp t) { return t.time_since_epoch().count(); }
inline Timestamp from_epoch_seconds(std::int64_t s) { return Timestamp{Seconds{s}}; }

// Monday = 0 ... Sunday = 6.
int weekday_index(Timestamp t);
std::int64_t seconds_of_day(Timestamp t);
// Seconds since the most recent Monday 00:00.
std::int64_t seconds_of_week(Timestamp t);
// Index of the Monday-based calendar week containing t.
std::int64_t week_index(Timestamp t);

inline double to_hours(std::int64_t seconds) {
  return static_cast<double>(seconds) / static_cast<double>(kSecondsPerHour);
}

}  // namespace procsim
