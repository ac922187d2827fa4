#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "procsim/discovery.hpp"
#include "procsim/event_log.hpp"
#include "procsim/rng.hpp"

namespace procsim {

struct SimulationConfig {
  Architecture architecture = Architecture::Orchestrated;
  Assignment assignment = Assignment::Iterative;
  bool use_extraneous_delays = false;
  std::size_t n_cases = 1;
  Timestamp start_time{};
  // true: exactly n_cases arrivals. false: arrivals continue until n_cases
  // cases have completed; the log holds the first n_cases completions.
  bool evaluation_mode = true;
  std::uint64_t seed = 0;
  int horizon_days = 30;

  void validate() const;
};

// A running case.
struct CaseState {
  std::size_t arrival_order = 0;
  Timestamp arrived_at{};
  std::vector<int> prefix;  // activity ids executed so far
  std::optional<int> last_agent;
  std::optional<int> pending_activity;  // chosen but not yet allocated
  Timestamp enabled_at{};               // ready for its next step from this instant

  struct Executed {
    int activity;
    int agent;
    Timestamp start;
    Timestamp end;
  };
  std::vector<Executed> events;
};

// Occupation of one agent during a run.
class AgentRuntime {
 public:
  explicit AgentRuntime(bool infinite_capacity = false) : infinite_capacity_(infinite_capacity) {}

  bool infinite_capacity() const { return infinite_capacity_; }
  // True when [from, from + length) overlaps no busy interval; for length 0,
  // when the instant is not inside one.
  bool is_free(Timestamp from, Seconds length) const;
  // Earliest t >= from with is_free(t, length).
  Timestamp earliest_free(Timestamp from, Seconds length) const;
  void occupy(Timestamp from, Timestamp to);
  // Forgets intervals that ended at or before t.
  void release_before(Timestamp t);
  const std::map<std::int64_t, std::int64_t>& busy_intervals() const { return busy_; }

  // Direct assignment: work accepted but not yet finished, in FIFO order.
  std::deque<std::pair<Timestamp, Timestamp>> pending_queue;
  Timestamp queue_tail() const;

 private:
  bool infinite_capacity_;
  std::map<std::int64_t, std::int64_t> busy_;  // start -> end, pairwise disjoint
};

// Samples the next activity (kEndActivity for END) with suffix backoff.
// An empty prefix always draws from the global first-activity counts.
int next_activity(const TransitionModel& model, std::span<const int> prefix, std::optional<int> agent, Rng& rng);

// Earliest t >= clock such that [t, t + work) lies in working slots and
// [t, t + occupy) meets no busy interval; nullopt past the horizon.
std::optional<Timestamp> earliest_availability(const AgentRuntime& runtime, const Schedule& schedule, Timestamp clock,
                                               Seconds work, Seconds occupy, int horizon_days);
inline std::optional<Timestamp> earliest_availability(const AgentRuntime& runtime, const Schedule& schedule,
                                                      Timestamp clock, Seconds duration, int horizon_days) {
  return earliest_availability(runtime, schedule, clock, duration, duration, horizon_days);
}

struct Allocation {
  int agent;
  Timestamp start;
  Seconds duration;
  Seconds delay;
};

// Picks the agent for `activity`. Iterative allocation asks candidates in
// order (orchestrated: by earliest availability; autonomous: by handover
// probability from the case's last agent) and the first one whose sampled
// work window fits at `clock` accepts. Direct assignment samples one agent
// from the handover row and books it at its earliest availability. A case's
// first event always uses the orchestrated rule.
std::optional<Allocation> select_agent(const Mas& mas, const SimulationConfig& config, int activity,
                                       std::span<const int> candidates, const CaseState& state,
                                       std::vector<AgentRuntime>& runtimes, Timestamp clock, Rng& rng);

struct RunMetadata {
  std::uint64_t seed = 0;
  Architecture architecture = Architecture::Orchestrated;
  Assignment assignment = Assignment::Iterative;
  bool use_extraneous_delays = false;
  bool evaluation_mode = true;
  std::size_t n_cases = 0;
  std::size_t arrivals = 0;
  std::size_t completed = 0;
  std::size_t forced_allocations = 0;
  std::vector<std::string> warnings;
  double wall_clock_seconds = 0.0;

  // Wall-clock time is left out when the record must be reproducible.
  std::string to_json(bool include_wall_clock = true) const;
};

struct SimulationResult {
  EventLog log;
  RunMetadata meta;
  // Arrival instant of each case in `log`, same order. A case may wait before
  // its first event, so this can precede the first start.
  std::vector<Timestamp> arrivals;
};

SimulationResult simulate(const Mas& mas, const SimulationConfig& config);

}  // namespace procsim
