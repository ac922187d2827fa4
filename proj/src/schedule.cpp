#include "procsim/schedule.hpp"

#include <algorithm>

#include "procsim/error.hpp"

namespace procsim {
namespace {

void check_granularity(int minutes) {
  if (minutes <= 0 || 1440 % minutes != 0) {
    throw Error(ErrorCode::InvalidArgument, "schedule granularity must divide 1440 minutes");
  }
}

}  // namespace

Schedule Schedule::full_time(int granularity_minutes) {
  check_granularity(granularity_minutes);
  return Schedule(granularity_minutes, std::vector<bool>(7 * static_cast<std::size_t>(1440 / granularity_minutes), true));
}

Schedule::Schedule(int granularity_minutes, std::vector<bool> slots)
    : granularity_minutes_(granularity_minutes), slots_(std::move(slots)) {
  check_granularity(granularity_minutes);
  if (slots_.size() != 7 * slots_per_day()) {
    throw Error(ErrorCode::InvalidArgument, "schedule grid has wrong number of slots");
  }
  working_count_ = static_cast<std::size_t>(std::count(slots_.begin(), slots_.end(), true));
  always_available_ = working_count_ == slots_.size();
}

std::size_t Schedule::slot_index(Timestamp t) const {
  return static_cast<std::size_t>(seconds_of_week(t) / slot_seconds());
}

Timestamp Schedule::next_slot_boundary(Timestamp t) const {
  // Slot boundaries are multiples of the slot length since the epoch (the
  // epoch is midnight and slot lengths divide a day).
  const std::int64_t s = epoch_seconds(t);
  const std::int64_t len = slot_seconds();
  std::int64_t rem = s % len;
  if (rem < 0) rem += len;
  return from_epoch_seconds(s - rem + len);
}

std::optional<Timestamp> Schedule::next_working(Timestamp t) const {
  if (always_available_) return t;
  if (working_count_ == 0) return std::nullopt;
  if (is_working(t)) return t;
  Timestamp cur = next_slot_boundary(t);
  for (std::size_t i = 0; i <= slots_.size(); ++i) {
    if (slots_[slot_index(cur)]) return cur;
    cur = next_slot_boundary(cur);
  }
  return std::nullopt;
}

std::optional<Timestamp> Schedule::first_non_working(Timestamp from, Timestamp to) const {
  if (always_available_) return std::nullopt;
  Timestamp cur = from;
  while (cur < to) {
    if (!slots_[slot_index(cur)]) return cur;
    cur = next_slot_boundary(cur);
  }
  return std::nullopt;
}

std::int64_t Schedule::working_seconds(Timestamp from, Timestamp to) const {
  if (to <= from) return 0;
  const std::int64_t span = epoch_seconds(to) - epoch_seconds(from);
  if (always_available_) return span;
  const std::int64_t weeks = span / kSecondsPerWeek;
  std::int64_t total = weeks * static_cast<std::int64_t>(working_count_) * slot_seconds();
  Timestamp cur = from + Seconds{weeks * kSecondsPerWeek};
  while (cur < to) {
    const Timestamp next = std::min(next_slot_boundary(cur), to);
    if (slots_[slot_index(cur)]) total += epoch_seconds(next) - epoch_seconds(cur);
    cur = next;
  }
  return total;
}

}  // namespace procsim
