#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "procsim/time.hpp"

namespace procsim {

// Weekly availability grid: 7 days x (1440 / granularity) slots, Monday first.
class Schedule {
 public:
  static Schedule full_time(int granularity_minutes = 60);

  Schedule() : Schedule(full_time()) {}
  Schedule(int granularity_minutes, std::vector<bool> slots);

  int granularity_minutes() const { return granularity_minutes_; }
  std::int64_t slot_seconds() const { return granularity_minutes_ * 60LL; }
  std::size_t slots_per_day() const { return static_cast<std::size_t>(1440 / granularity_minutes_); }
  std::size_t num_slots() const { return slots_.size(); }
  bool always_available() const { return always_available_; }
  std::size_t working_slot_count() const { return working_count_; }
  const std::vector<bool>& slots() const { return slots_; }

  std::size_t slot_index(Timestamp t) const;
  bool is_working_slot(std::size_t index) const { return slots_[index]; }
  bool is_working(Timestamp t) const { return always_available_ || slots_[slot_index(t)]; }

  // Start of the slot after the one containing t.
  Timestamp next_slot_boundary(Timestamp t) const;
  // Earliest working instant >= t; nullopt when no slot is working.
  std::optional<Timestamp> next_working(Timestamp t) const;
  // First non-working instant in [from, to); nullopt if the whole window works.
  std::optional<Timestamp> first_non_working(Timestamp from, Timestamp to) const;
  // Working seconds inside [from, to).
  std::int64_t working_seconds(Timestamp from, Timestamp to) const;

  bool operator==(const Schedule&) const = default;

 private:
  int granularity_minutes_ = 60;
  std::vector<bool> slots_;
  bool always_available_ = true;
  std::size_t working_count_ = 0;
};

}  // namespace procsim
