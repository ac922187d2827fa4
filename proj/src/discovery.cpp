#include "procsim/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "procsim/error.hpp"

namespace procsim {

std::string_view architecture_name(Architecture a) {
  return a == Architecture::Orchestrated ? "orchestrated" : "autonomous";
}

Architecture architecture_from_name(std::string_view name) {
  if (name == "orchestrated") return Architecture::Orchestrated;
  if (name == "autonomous") return Architecture::Autonomous;
  throw Error(ErrorCode::InvalidArgument, "unknown architecture '" + std::string(name) + "'");
}

std::string_view assignment_name(Assignment a) { return a == Assignment::Iterative ? "iterative" : "direct"; }

Assignment assignment_from_name(std::string_view name) {
  if (name == "iterative") return Assignment::Iterative;
  if (name == "direct") return Assignment::Direct;
  throw Error(ErrorCode::InvalidArgument, "unknown assignment '" + std::string(name) + "'");
}

std::vector<int> Capabilities::alloc() const {
  std::vector<int> out;
  out.reserve(durations.size());
  for (const auto& [act, _] : durations) out.push_back(act);
  return out;
}

int IndexedLog::activity_id(std::string_view label) const {
  auto it = std::lower_bound(activities.begin(), activities.end(), label);
  return (it != activities.end() && *it == label) ? static_cast<int>(it - activities.begin()) : -1;
}

int Mas::activity_id(std::string_view label) const {
  auto it = std::lower_bound(activities.begin(), activities.end(), label);
  return (it != activities.end() && *it == label) ? static_cast<int>(it - activities.begin()) : -1;
}

std::vector<int> Mas::candidates(int activity) const {
  std::vector<int> out;
  for (const auto& a : agents) {
    if (a.capabilities.can_perform(activity)) out.push_back(a.id);
  }
  return out;
}

std::size_t Mas::num_types() const {
  std::set<int> types;
  for (const auto& a : agents) types.insert(a.agent_type);
  return types.size();
}

void Mas::validate() const {
  const auto n = static_cast<int>(activities.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    if (a.id != static_cast<int>(i)) throw Error(ErrorCode::Model, "agent ids must be dense and ordered");
    for (const auto& [act, dist] : a.capabilities.durations) {
      if (act < 0 || act >= n) throw Error(ErrorCode::Model, "agent '" + a.name + "' has an unknown activity");
      if (!dist.valid()) throw Error(ErrorCode::Model, "agent '" + a.name + "' has an invalid duration model");
    }
    if (a.is_dummy && (!a.schedule.always_available() || a.capabilities.durations.size() != 1)) {
      throw Error(ErrorCode::Model, "dummy agent '" + a.name + "' must be always available with one activity");
    }
  }
  for (int act = 0; act < n; ++act) {
    if (candidates(act).empty()) {
      throw Error(ErrorCode::Model, "activity '" + activities[static_cast<std::size_t>(act)] +
                                        "' cannot be allocated to any agent");
    }
  }
  if (!interarrival.valid()) throw Error(ErrorCode::Model, "invalid inter-arrival distribution");
  if (extraneous_delays.size() != activities.size()) {
    throw Error(ErrorCode::Model, "extraneous delay table does not match the activity set");
  }
  if (handovers.size() != agents.size()) throw Error(ErrorCode::Model, "handover matrix size mismatch");
  if (local_transitions.scope() != BehaviorScope::Local ||
      local_transitions.performer_keys().size() != agents.size()) {
    throw Error(ErrorCode::Model, "local transition model does not cover all agents");
  }
  if (architecture == Architecture::Orchestrated && assignment == Assignment::Direct) {
    throw Error(ErrorCode::Model, "direct assignment requires the autonomous architecture");
  }
}

std::vector<Agent> discover_agents(const EventLog& log) {
  std::vector<Agent> agents;
  for (const auto& res : log.resources()) {
    Agent a;
    a.id = static_cast<int>(agents.size());
    a.name = res;
    agents.push_back(std::move(a));
  }
  std::set<std::string> unassigned;
  for (const auto& t : log.traces()) {
    for (const auto& e : t.events) {
      if (!e.resource) unassigned.insert(e.activity);
    }
  }
  for (const auto& act : unassigned) {
    Agent a;
    a.id = static_cast<int>(agents.size());
    a.name = dummy_label(act);
    a.is_dummy = true;
    agents.push_back(std::move(a));
  }
  return agents;
}

IndexedLog index_log(const EventLog& log, const std::vector<Agent>& agents) {
  IndexedLog out;
  out.activities.assign(log.activities().begin(), log.activities().end());
  std::unordered_map<std::string, int> by_name;
  for (const auto& a : agents) by_name.emplace(a.name, a.id);
  out.traces.reserve(log.num_cases());
  for (const auto& t : log.traces()) {
    std::vector<IndexedLog::Event> events;
    events.reserve(t.events.size());
    for (const auto& e : t.events) {
      const auto it = by_name.find(resource_label(e));
      if (it == by_name.end()) throw Error(ErrorCode::Model, "no agent for resource '" + resource_label(e) + "'");
      events.push_back({out.activity_id(e.activity), it->second, e.start, e.end});
    }
    out.traces.push_back(std::move(events));
  }
  return out;
}

std::vector<int> discover_agent_types(const std::vector<Agent>& agents, const IndexedLog& log, double threshold) {
  const std::size_t n = agents.size();
  const std::size_t m = log.activities.size();
  std::vector<std::vector<double>> profile(n, std::vector<double>(m, 0.0));
  for (const auto& t : log.traces) {
    for (const auto& e : t) profile[static_cast<std::size_t>(e.agent)][static_cast<std::size_t>(e.activity)] += 1.0;
  }
  std::vector<double> norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : profile[i]) s += v * v;
    norm[i] = std::sqrt(s);
  }
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 1.0;
      if (norm[i] > 0.0 && norm[j] > 0.0) {
        double dot = 0.0;
        for (std::size_t k = 0; k < m; ++k) dot += profile[i][k] * profile[j][k];
        d = std::clamp(1.0 - dot / (norm[i] * norm[j]), 0.0, 2.0);
      }
      dist[i][j] = dist[j][i] = d;
    }
  }

  // Clusters are named by their lowest member id; scanning representatives in
  // increasing order with a strict comparison breaks ties by lowest id.
  std::vector<int> rep(n);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) rep[i] = static_cast<int>(i);
  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == n || !(best < threshold)) break;
    // Average linkage (Lance-Williams update).
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double d = (static_cast<double>(size[bi]) * dist[bi][k] + static_cast<double>(size[bj]) * dist[bj][k]) /
                       static_cast<double>(size[bi] + size[bj]);
      dist[bi][k] = dist[k][bi] = d;
    }
    size[bi] += size[bj];
    active[bj] = false;
    for (auto& r : rep) {
      if (r == static_cast<int>(bj)) r = static_cast<int>(bi);
    }
  }

  std::vector<int> type_of_rep(n, -1);
  int next_type = 0;
  std::vector<int> types(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& t = type_of_rep[static_cast<std::size_t>(rep[i])];
    if (t < 0) t = next_type++;
    types[i] = t;
  }
  return types;
}

Schedule discover_schedule(const IndexedLog& log, const Agent& agent, const DiscoveryOptions& options,
                           std::vector<std::string>* warnings) {
  if (agent.is_dummy) return Schedule::full_time(options.granularity_minutes);

  Schedule grid_shape = Schedule::full_time(options.granularity_minutes);
  const std::size_t num_slots = grid_shape.num_slots();
  const std::int64_t slot_len = grid_shape.slot_seconds();
  std::vector<std::uint64_t> counts(num_slots, 0);
  std::set<std::int64_t> weeks;
  std::size_t events = 0;
  std::vector<std::size_t> touched;

  for (const auto& t : log.traces) {
    for (const auto& e : t) {
      if (e.agent != agent.id) continue;
      ++events;
      weeks.insert(week_index(e.start));
      weeks.insert(week_index(e.end));
      touched.clear();
      touched.push_back(grid_shape.slot_index(e.start));
      const std::int64_t span = epoch_seconds(e.end) - epoch_seconds(e.start);
      if (span > 0 && span <= kSecondsPerDay) {
        // Every slot overlapping [start, end).
        Timestamp cur = grid_shape.next_slot_boundary(e.start);
        while (cur < e.end) {
          touched.push_back(grid_shape.slot_index(cur));
          cur += Seconds{slot_len};
        }
      } else if (span > 0) {
        touched.push_back(grid_shape.slot_index(e.end - Seconds{1}));
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (auto s : touched) ++counts[s];
    }
  }

  if (events == 0) {
    if (warnings) warnings->push_back("agent '" + agent.name + "' has no events; assuming always available");
    return Schedule::full_time(options.granularity_minutes);
  }

  const auto active_weeks = static_cast<double>(weeks.size());
  std::vector<bool> slots(num_slots, false);
  bool any = false;
  for (std::size_t s = 0; s < num_slots; ++s) {
    if (static_cast<double>(counts[s]) / active_weeks >= options.schedule_support) {
      slots[s] = true;
      any = true;
    }
  }
  if (!any) {
    // Too sparse to reach the support threshold: keep every observed slot.
    for (std::size_t s = 0; s < num_slots; ++s) slots[s] = counts[s] > 0;
    if (warnings) warnings->push_back("agent '" + agent.name + "' below schedule support; using observed slots");
  }
  return Schedule(options.granularity_minutes, std::move(slots));
}

Capabilities discover_capabilities(const IndexedLog& log, const Agent& agent) {
  std::map<int, std::vector<double>> samples;
  for (const auto& t : log.traces) {
    for (const auto& e : t) {
      if (e.agent != agent.id) continue;
      samples[e.activity].push_back(static_cast<double>(epoch_seconds(e.end) - epoch_seconds(e.start)));
    }
  }
  Capabilities caps;
  for (auto& [act, xs] : samples) caps.durations.emplace(act, fit_distribution(xs));
  return caps;
}

TransitionModel discover_transition_model(const IndexedLog& log, BehaviorScope scope,
                                          const std::vector<int>& agent_types, const DiscoveryOptions& options) {
  std::vector<std::vector<int>> acts(log.traces.size());
  std::vector<std::vector<int>> performers(log.traces.size());
  std::vector<SequenceView> views;
  views.reserve(log.traces.size());
  for (std::size_t i = 0; i < log.traces.size(); ++i) {
    for (const auto& e : log.traces[i]) {
      acts[i].push_back(e.activity);
      performers[i].push_back(e.agent);
    }
    views.push_back({acts[i], performers[i]});
  }
  std::vector<int> keys(agent_types.size());
  std::size_t num_keys = agent_types.size();
  if (options.type_level_behavior) {
    keys = agent_types;
    num_keys = agent_types.empty() ? 0 : static_cast<std::size_t>(*std::max_element(agent_types.begin(), agent_types.end())) + 1;
  } else {
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = static_cast<int>(i);
  }
  return TransitionModel::build(scope, views, std::move(keys), num_keys, options.max_prefix_len);
}

HandoverMatrix discover_handover_matrix(const IndexedLog& log, std::size_t num_agents) {
  HandoverMatrix m(num_agents);
  for (const auto& t : log.traces) {
    for (std::size_t k = 1; k < t.size(); ++k) {
      m.add(static_cast<std::size_t>(t[k - 1].agent), static_cast<std::size_t>(t[k].agent));
    }
  }
  return m;
}

FittedDistribution discover_interarrival(const EventLog& log) {
  if (log.num_cases() < 2) {
    throw Error(ErrorCode::InvalidArgument, "inter-arrival discovery needs at least 2 cases");
  }
  std::vector<std::int64_t> starts;
  starts.reserve(log.num_cases());
  for (const auto& t : log.traces()) starts.push_back(epoch_seconds(t.first_start()));
  std::sort(starts.begin(), starts.end());
  std::vector<double> gaps;
  gaps.reserve(starts.size() - 1);
  for (std::size_t i = 1; i < starts.size(); ++i) gaps.push_back(static_cast<double>(starts[i] - starts[i - 1]));
  return fit_distribution(gaps);
}

namespace {

using Interval = std::pair<std::int64_t, std::int64_t>;

std::vector<Interval> merge_intervals(std::vector<Interval> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<Interval> out;
  for (const auto& iv : xs) {
    if (iv.second <= iv.first) continue;
    if (!out.empty() && iv.first <= out.back().second) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

// Seconds of [from, to) during which the agent is neither busy nor off shift.
std::int64_t idle_on_shift(std::int64_t from, std::int64_t to, const std::vector<Interval>& busy,
                           const Schedule& schedule) {
  std::int64_t total = 0;
  std::int64_t cur = from;
  auto it = std::upper_bound(busy.begin(), busy.end(), Interval{from, std::numeric_limits<std::int64_t>::max()});
  if (it != busy.begin()) --it;
  for (; it != busy.end() && cur < to; ++it) {
    if (it->second <= cur) continue;
    if (it->first >= to) break;
    if (it->first > cur) total += schedule.working_seconds(from_epoch_seconds(cur), from_epoch_seconds(it->first));
    cur = std::max(cur, it->second);
  }
  if (cur < to) total += schedule.working_seconds(from_epoch_seconds(cur), from_epoch_seconds(to));
  return total;
}

}  // namespace

std::vector<std::optional<FittedDistribution>> discover_extraneous_delays(const IndexedLog& log,
                                                                          const std::vector<Agent>& agents,
                                                                          const DiscoveryOptions& options) {
  std::vector<std::vector<Interval>> busy(agents.size());
  for (const auto& t : log.traces) {
    for (const auto& e : t) {
      busy[static_cast<std::size_t>(e.agent)].emplace_back(epoch_seconds(e.start), epoch_seconds(e.end));
    }
  }
  for (auto& b : busy) b = merge_intervals(std::move(b));

  const std::size_t m = log.activities.size();
  std::vector<std::size_t> observed(m, 0);
  std::vector<std::vector<double>> residuals(m);
  for (const auto& t : log.traces) {
    for (std::size_t k = 1; k < t.size(); ++k) {
      const auto& e = t[k];
      const auto act = static_cast<std::size_t>(e.activity);
      ++observed[act];
      const std::int64_t enabled = epoch_seconds(t[k - 1].end);
      const std::int64_t start = epoch_seconds(e.start);
      if (start <= enabled) continue;
      const Agent& agent = agents[static_cast<std::size_t>(e.agent)];
      // Dummy agents never queue, so none of their waiting is contention.
      const std::int64_t residual =
          agent.is_dummy ? start - enabled : idle_on_shift(enabled, start, busy[static_cast<std::size_t>(e.agent)], agent.schedule);
      if (residual > 0) residuals[act].push_back(static_cast<double>(residual));
    }
  }

  std::vector<std::optional<FittedDistribution>> out(m);
  for (std::size_t act = 0; act < m; ++act) {
    if (observed[act] == 0 || residuals[act].empty()) continue;
    const double share = static_cast<double>(residuals[act].size()) / static_cast<double>(observed[act]);
    if (share > options.delay_min_fraction) out[act] = fit_distribution(residuals[act]);
  }
  return out;
}

DiscoveryResult discover_mas(const EventLog& log, const DiscoveryOptions& options) {
  if (log.empty()) throw Error(ErrorCode::InvalidArgument, "cannot discover a model from an empty log");
  DiscoveryResult result;
  Mas& mas = result.mas;
  mas.options = options;
  mas.activities.assign(log.activities().begin(), log.activities().end());
  mas.agents = discover_agents(log);
  const IndexedLog indexed = index_log(log, mas.agents);

  const auto types = discover_agent_types(mas.agents, indexed, options.type_threshold);
  for (auto& a : mas.agents) {
    a.agent_type = types[static_cast<std::size_t>(a.id)];
    a.schedule = discover_schedule(indexed, a, options, &result.warnings);
    a.capabilities = discover_capabilities(indexed, a);
  }
  mas.global_transitions = discover_transition_model(indexed, BehaviorScope::Global, types, options);
  mas.local_transitions = discover_transition_model(indexed, BehaviorScope::Local, types, options);
  mas.handovers = discover_handover_matrix(indexed, mas.agents.size());
  mas.interarrival = discover_interarrival(log);
  mas.extraneous_delays = discover_extraneous_delays(indexed, mas.agents, options);
  for (const auto& t : log.traces()) mas.training_end = std::max(mas.training_end, t.last_end());
  mas.validate();
  return result;
}

}  // namespace procsim
