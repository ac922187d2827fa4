#include "procsim/time.hpp"

#include <cstdio>

namespace procsim {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Reads exactly `width` digits at text[pos].
std::optional<int> read_fixed(std::string_view text, std::size_t pos, std::size_t width) {
  if (pos + width > text.size()) return std::nullopt;
  int value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const char c = text[pos + i];
    if (!is_digit(c)) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view raw) {
  using namespace std::chrono;
  const std::string_view text = trim(raw);

  const auto y = read_fixed(text, 0, 4);
  const auto mo = read_fixed(text, 5, 2);
  const auto d = read_fixed(text, 8, 2);
  if (!y || !mo || !d || text[4] != '-' || text[7] != '-') return std::nullopt;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;

  std::int64_t secs = 0;
  std::size_t pos = 10;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != ' ') return std::nullopt;
    ++pos;
    const auto hh = read_fixed(text, pos, 2);
    if (!hh || pos + 2 >= text.size() || text[pos + 2] != ':') return std::nullopt;
    const auto mm = read_fixed(text, pos + 3, 2);
    if (!mm) return std::nullopt;
    pos += 5;
    int ss = 0;
    if (pos < text.size() && text[pos] == ':') {
      const auto s = read_fixed(text, pos + 1, 2);
      if (!s) return std::nullopt;
      ss = *s;
      pos += 3;
      if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
        ++pos;
        const std::size_t frac_start = pos;
        while (pos < text.size() && is_digit(text[pos])) ++pos;
        if (pos == frac_start) return std::nullopt;
      }
    }
    if (*hh > 23 || *mm > 59 || ss > 60) return std::nullopt;
    secs = *hh * 3600LL + *mm * 60LL + ss;

    if (pos < text.size()) {
      const char sign = text[pos];
      if (sign == 'Z' || sign == 'z') {
        ++pos;
      } else if (sign == '+' || sign == '-') {
        const auto oh = read_fixed(text, pos + 1, 2);
        if (!oh) return std::nullopt;
        pos += 3;
        int om = 0;
        if (pos < text.size()) {
          if (text[pos] == ':') ++pos;
          const auto m = read_fixed(text, pos, 2);
          if (!m) return std::nullopt;
          om = *m;
          pos += 2;
        }
        const std::int64_t offset = *oh * 3600LL + om * 60LL;
        secs += (sign == '+') ? -offset : offset;
      }
    }
    if (pos != text.size()) return std::nullopt;
  }

  const sys_days days{ymd};
  return Timestamp{duration_cast<Seconds>(days.time_since_epoch()) + Seconds{secs}};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const std::int64_t s = epoch_seconds(t);
  const std::int64_t days = floor_div(s, kSecondsPerDay);
  const std::int64_t sod = s - days * kSecondsPerDay;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(sod / 3600), static_cast<long long>((sod / 60) % 60),
                static_cast<long long>(sod % 60));
  return buf;
}

int weekday_index(Timestamp t) {
  // 1970-01-01 was a Thursday.
  const std::int64_t days = floor_div(epoch_seconds(t), kSecondsPerDay);
  return static_cast<int>(floor_mod(days + 3, 7));
}

std::int64_t seconds_of_day(Timestamp t) { return floor_mod(epoch_seconds(t), kSecondsPerDay); }

std::int64_t seconds_of_week(Timestamp t) {
  return weekday_index(t) * kSecondsPerDay + seconds_of_day(t);
}

std::int64_t week_index(Timestamp t) {
  const std::int64_t days = floor_div(epoch_seconds(t), kSecondsPerDay);
  return floor_div(days + 3, 7);
}

}  // namespace procsim
