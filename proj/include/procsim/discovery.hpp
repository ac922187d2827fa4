#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procsim/distributions.hpp"
#include "procsim/event_log.hpp"
#include "procsim/schedule.hpp"
#include "procsim/transition_model.hpp"

namespace procsim {

enum class Architecture { Orchestrated, Autonomous };
enum class Assignment { Iterative, Direct };

std::string_view architecture_name(Architecture a);
Architecture architecture_from_name(std::string_view name);
std::string_view assignment_name(Assignment a);
Assignment assignment_from_name(std::string_view name);

struct DiscoveryOptions {
  int granularity_minutes = 60;
  double schedule_support = 0.1;
  double type_threshold = 0.4;      // cosine distance below which agent clusters merge
  double delay_min_fraction = 0.2;  // share of delayed events needed to model a delay
  bool type_level_behavior = false; // local transitions per agent type instead of per agent
  std::size_t max_prefix_len = 0;   // 0 = unbounded

  bool operator==(const DiscoveryOptions&) const = default;
};

struct Capabilities {
  // Activity id -> processing-time distribution; the keys form Alloc.
  std::map<int, FittedDistribution> durations;

  bool can_perform(int activity) const { return durations.count(activity) != 0; }
  std::vector<int> alloc() const;

  bool operator==(const Capabilities&) const = default;
};

struct Agent {
  int id = 0;
  std::string name;
  int agent_type = 0;
  Schedule schedule;
  Capabilities capabilities;
  bool is_dummy = false;

  bool operator==(const Agent&) const = default;
};

// Event log with activities and performers replaced by dense ids, in the
// same trace order as the source log.
struct IndexedLog {
  struct Event {
    int activity;
    int agent;
    Timestamp start;
    Timestamp end;
  };
  std::vector<std::string> activities;  // sorted labels; id = position
  std::vector<std::vector<Event>> traces;

  int activity_id(std::string_view label) const;
};

// The discovered simulation model.
struct Mas {
  std::vector<std::string> activities;
  std::vector<Agent> agents;
  TransitionModel global_transitions;  // orchestrated handovers
  TransitionModel local_transitions;   // autonomous handovers
  HandoverMatrix handovers;
  FittedDistribution interarrival;
  std::vector<std::optional<FittedDistribution>> extraneous_delays;  // by activity id
  Architecture architecture = Architecture::Orchestrated;
  Assignment assignment = Assignment::Iterative;
  bool use_extraneous_delays = false;
  DiscoveryOptions options;
  Timestamp training_end{};  // latest instant of the discovery log; default simulation start

  int activity_id(std::string_view label) const;
  // Agents whose Alloc contains the activity, ascending id.
  std::vector<int> candidates(int activity) const;
  std::size_t num_types() const;
  // Throws ErrorCode::Model on a structurally invalid model.
  void validate() const;

  bool operator==(const Mas&) const = default;
};

// One agent per resource (sorted by label), then one dummy agent per activity
// having events without a resource (sorted by activity). Only id, name and
// is_dummy are filled in; dummies get always-available schedules.
std::vector<Agent> discover_agents(const EventLog& log);

IndexedLog index_log(const EventLog& log, const std::vector<Agent>& agents);

// Agglomerative average-linkage clustering of activity profiles under cosine
// distance. Returns a type id per agent, numbered by lowest member id.
std::vector<int> discover_agent_types(const std::vector<Agent>& agents, const IndexedLog& log,
                                      double threshold);

Schedule discover_schedule(const IndexedLog& log, const Agent& agent, const DiscoveryOptions& options,
                           std::vector<std::string>* warnings = nullptr);

Capabilities discover_capabilities(const IndexedLog& log, const Agent& agent);

TransitionModel discover_transition_model(const IndexedLog& log, BehaviorScope scope,
                                          const std::vector<int>& agent_types,
                                          const DiscoveryOptions& options);

HandoverMatrix discover_handover_matrix(const IndexedLog& log, std::size_t num_agents);

FittedDistribution discover_interarrival(const EventLog& log);

// Residual waiting time before each non-first event that is explained neither
// by the performer being busy nor by it being off shift.
std::vector<std::optional<FittedDistribution>> discover_extraneous_delays(const IndexedLog& log,
                                                                          const std::vector<Agent>& agents,
                                                                          const DiscoveryOptions& options);

struct DiscoveryResult {
  Mas mas;
  std::vector<std::string> warnings;
};

DiscoveryResult discover_mas(const EventLog& log, const DiscoveryOptions& options = {});

}  // namespace procsim
