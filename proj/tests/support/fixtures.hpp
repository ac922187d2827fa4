#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procsim/event_log.hpp"

namespace fixtures {

using procsim::EventLog;
using procsim::Timestamp;

Timestamp at(std::string_view iso);

// Accumulates rows and builds an EventLog.
class LogBuilder {
 public:
  LogBuilder& add(const std::string& case_id, const std::string& activity, std::string_view start,
                  std::string_view end, std::optional<std::string> resource = std::nullopt);
  LogBuilder& add(const std::string& case_id, const std::string& activity, Timestamp start, Timestamp end,
                  std::optional<std::string> resource = std::nullopt);
  EventLog build() const;

 private:
  std::vector<procsim::Trace> traces_;
};

// Parameters of a synthetic weekday 9-to-17 process. Activities form a chain
// A00..A<n-1> walked with skips (or rework steps when traces are longer than
// the chain); resources are split into role pools over consecutive activities
// and prefer handing a case to "their" colleague in the next pool.
struct SyntheticSpec {
  std::string name;
  std::size_t cases = 100;
  std::size_t activities = 10;
  std::size_t resources = 10;
  double mean_trace_length = 8.0;
  // Activities (from the end of the chain) that are partly executed without a
  // recorded resource.
  std::size_t unassigned_activities = 0;
  double mean_interarrival_minutes = 30.0;  // working time
  double mean_duration_minutes = 30.0;
  double delay_probability = 0.2;  // customer wait before an activity
  std::uint64_t seed = 1;
  std::string start = "2023-01-02T09:00:00Z";  // a Monday
};

EventLog synthesize(const SyntheticSpec& spec);

// 1000 traces, 12 activities, 19 resources, ~7.5 events per trace.
SyntheticSpec loan_spec();
// 225 traces, ~4500 events, 24 activities, 41 resources.
SyntheticSpec production_spec();
// Nine small logs shaped after commonly used simulation benchmarks.
std::vector<SyntheticSpec> benchmark_style_specs();

}  // namespace fixtures
