#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "procsim/time.hpp"

namespace procsim {

struct Event {
  std::string activity;
  Timestamp start;
  Timestamp end;
  std::optional<std::string> resource;

  bool operator==(const Event&) const = default;
};

// Total order used inside a trace: start, then end, then activity label,
// then resource (absent first).
bool event_order_less(const Event& a, const Event& b);

struct Trace {
  std::string case_id;
  std::vector<Event> events;

  Timestamp first_start() const;
  Timestamp last_end() const;

  bool operator==(const Trace&) const = default;
};

struct ColumnMap {
  std::string case_id = "case_id";
  std::string activity = "activity";
  std::string start = "start_time";
  std::string end = "end_time";
  // Empty means the source has no resource column.
  std::string resource = "resource";
};

// Immutable multiset of traces. Construction sorts each trace's events and
// orders traces by case id, so two logs with the same content compare equal.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<Trace> traces);

  const std::vector<Trace>& traces() const { return traces_; }
  const std::set<std::string>& activities() const { return activities_; }
  const std::set<std::string>& resources() const { return resources_; }

  std::size_t num_cases() const { return traces_.size(); }
  std::size_t num_events() const { return num_events_; }
  bool empty() const { return traces_.empty(); }

  bool operator==(const EventLog& other) const { return traces_ == other.traces_; }

 private:
  std::vector<Trace> traces_;
  std::set<std::string> activities_;
  std::set<std::string> resources_;
  std::size_t num_events_ = 0;
};

EventLog parse_log(std::istream& source, const ColumnMap& columns = {});
EventLog read_log(const std::filesystem::path& path, const ColumnMap& columns = {});

void write_log(const EventLog& log, std::ostream& sink);
void save_log(const EventLog& log, const std::filesystem::path& path);

struct SplitResult {
  EventLog train;
  EventLog test;
  std::vector<std::string> dropped;  // case ids spanning the separation time
  Timestamp separation;
};

// Orders cases by first start (ties by case id); the separation time is the
// start of the case at index ceil(train_fraction * #cases).
SplitResult temporal_split(const EventLog& log, double train_fraction);

// Cases ordered by (first start, case id).
std::vector<const Trace*> cases_by_start(const EventLog& log);

// Label standing in for a missing resource on events of `activity`.
std::string dummy_label(std::string_view activity);
std::string resource_label(const Event& e);

}  // namespace procsim
