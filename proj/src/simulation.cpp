#include "procsim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "procsim/error.hpp"

namespace procsim {

void SimulationConfig::validate() const {
  if (n_cases == 0) throw Error(ErrorCode::InvalidArgument, "n_cases must be positive");
  if (horizon_days <= 0) throw Error(ErrorCode::InvalidArgument, "horizon_days must be positive");
  if (assignment == Assignment::Direct && architecture != Architecture::Autonomous) {
    throw Error(ErrorCode::InvalidArgument, "direct assignment requires the autonomous architecture");
  }
}

bool AgentRuntime::is_free(Timestamp from, Seconds length) const {
  if (infinite_capacity_) return true;
  return earliest_free(from, length) == from;
}

Timestamp AgentRuntime::earliest_free(Timestamp from, Seconds length) const {
  if (infinite_capacity_ || busy_.empty()) return from;
  std::int64_t t = epoch_seconds(from);
  const std::int64_t len = length.count();
  auto it = busy_.upper_bound(t);
  if (it != busy_.begin()) --it;
  for (; it != busy_.end(); ++it) {
    const auto [s, e] = *it;
    if (e <= t) continue;
    const bool overlaps = len > 0 ? (s < t + len) : (s <= t);
    if (!overlaps) break;
    t = e;
  }
  return from_epoch_seconds(t);
}

void AgentRuntime::occupy(Timestamp from, Timestamp to) {
  if (infinite_capacity_ || to <= from) return;
  if (!is_free(from, to - from)) throw Error(ErrorCode::Internal, "agent double-booked");
  busy_.emplace(epoch_seconds(from), epoch_seconds(to));
}

void AgentRuntime::release_before(Timestamp t) {
  const std::int64_t s = epoch_seconds(t);
  for (auto it = busy_.begin(); it != busy_.end() && it->first < s;) {
    it = it->second <= s ? busy_.erase(it) : std::next(it);
  }
  while (!pending_queue.empty() && pending_queue.front().second <= t) pending_queue.pop_front();
}

Timestamp AgentRuntime::queue_tail() const {
  Timestamp tail{};
  for (const auto& [s, e] : pending_queue) tail = std::max(tail, e);
  return tail;
}

int next_activity(const TransitionModel& model, std::span<const int> prefix, std::optional<int> agent, Rng& rng) {
  const auto found = model.lookup(prefix, agent);
  if (!found.counts || found.counts->empty()) {
    throw Error(ErrorCode::Model, "no transition information for the current prefix");
  }
  std::vector<std::uint64_t> weights;
  weights.reserve(found.counts->counts.size());
  for (const auto& [_, n] : found.counts->counts) weights.push_back(n);
  const auto k = rng.categorical(std::span<const std::uint64_t>(weights));
  return found.counts->counts[k].first;
}

std::optional<Timestamp> earliest_availability(const AgentRuntime& runtime, const Schedule& schedule, Timestamp clock,
                                               Seconds work, Seconds occupy, int horizon_days) {
  const Timestamp limit = clock + Seconds{static_cast<std::int64_t>(horizon_days) * kSecondsPerDay};
  Timestamp t = clock;
  while (t <= limit) {
    if (!schedule.always_available()) {
      const auto w = schedule.next_working(t);
      if (!w) return std::nullopt;
      if (*w != t) {
        t = *w;
        continue;
      }
      if (work.count() > 0) {
        if (const auto gap = schedule.first_non_working(t, t + work)) {
          const auto resume = schedule.next_working(*gap);
          if (!resume) return std::nullopt;
          t = *resume;
          continue;
        }
      }
    }
    const Timestamp f = runtime.earliest_free(t, occupy);
    if (f != t) {
      t = f;
      continue;
    }
    return t;
  }
  return std::nullopt;
}

namespace {

Seconds sample_seconds(const FittedDistribution& d, Rng& rng) {
  const double x = sample_distribution(d, rng);
  // Guard against absurd tails; a century is far past any horizon.
  constexpr double kCap = 100.0 * 365.0 * kSecondsPerDay;
  return Seconds{std::llround(std::clamp(x, 0.0, kCap))};
}

struct Draw {
  Seconds duration;
  Seconds delay;
};

Draw draw_work(const Mas& mas, const SimulationConfig& config, int agent, int activity, Rng& rng) {
  const auto& caps = mas.agents[static_cast<std::size_t>(agent)].capabilities.durations;
  const auto it = caps.find(activity);
  if (it == caps.end()) throw Error(ErrorCode::Model, "agent cannot perform the requested activity");
  Draw d{sample_seconds(it->second, rng), Seconds{0}};
  if (config.use_extraneous_delays) {
    const auto& delay = mas.extraneous_delays[static_cast<std::size_t>(activity)];
    if (delay) d.delay = sample_seconds(*delay, rng);
  }
  return d;
}

bool fits_now(const Agent& agent, const AgentRuntime& rt, Timestamp clock, const Draw& d) {
  const Schedule& s = agent.schedule;
  if (d.duration.count() == 0) {
    if (!s.is_working(clock)) return false;
  } else if (s.first_non_working(clock, clock + d.duration)) {
    return false;
  }
  return rt.is_free(clock, d.duration + d.delay);
}

Timestamp availability_key(const Mas& mas, const std::vector<AgentRuntime>& runtimes, int agent, Timestamp clock,
                           int horizon_days) {
  const auto a = static_cast<std::size_t>(agent);
  const auto t = earliest_availability(runtimes[a], mas.agents[a].schedule, clock, Seconds{0}, horizon_days);
  return t ? *t : Timestamp::max();
}

std::vector<int> by_availability(const Mas& mas, const std::vector<AgentRuntime>& runtimes, std::vector<int> agents,
                                 Timestamp clock, int horizon_days) {
  std::vector<std::pair<Timestamp, int>> keyed;
  keyed.reserve(agents.size());
  for (int a : agents) keyed.emplace_back(availability_key(mas, runtimes, a, clock, horizon_days), a);
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < keyed.size(); ++i) agents[i] = keyed[i].second;
  return agents;
}

std::optional<Allocation> ask_in_order(const Mas& mas, const SimulationConfig& config, int activity,
                                       const std::vector<int>& order, const std::vector<AgentRuntime>& runtimes,
                                       Timestamp clock, Rng& rng) {
  for (int a : order) {
    const Draw d = draw_work(mas, config, a, activity, rng);
    const auto idx = static_cast<std::size_t>(a);
    if (fits_now(mas.agents[idx], runtimes[idx], clock, d)) return Allocation{a, clock, d.duration, d.delay};
  }
  return std::nullopt;
}

}  // namespace

std::optional<Allocation> select_agent(const Mas& mas, const SimulationConfig& config, int activity,
                                       std::span<const int> candidates, const CaseState& state,
                                       std::vector<AgentRuntime>& runtimes, Timestamp clock, Rng& rng) {
  if (candidates.empty()) throw Error(ErrorCode::Model, "no agent can perform activity " + std::to_string(activity));
  const std::vector<int> cands(candidates.begin(), candidates.end());
  const bool autonomous = config.architecture == Architecture::Autonomous && state.last_agent.has_value();

  if (!autonomous) {
    return ask_in_order(mas, config, activity, by_availability(mas, runtimes, cands, clock, config.horizon_days),
                        runtimes, clock, rng);
  }

  const auto from = static_cast<std::size_t>(*state.last_agent);
  std::vector<double> p;
  p.reserve(cands.size());
  for (int c : cands) p.push_back(mas.handovers.probability(from, static_cast<std::size_t>(c)));

  if (config.assignment == Assignment::Iterative) {
    std::vector<std::pair<double, int>> likely;
    std::vector<int> rest;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (p[i] > 0.0) {
        likely.emplace_back(-p[i], cands[i]);
      } else {
        rest.push_back(cands[i]);
      }
    }
    std::sort(likely.begin(), likely.end());
    std::vector<int> order;
    for (const auto& [_, a] : likely) order.push_back(a);
    for (int a : by_availability(mas, runtimes, rest, clock, config.horizon_days)) order.push_back(a);
    return ask_in_order(mas, config, activity, order, runtimes, clock, rng);
  }

  // Direct assignment. No handover mass towards any candidate: fall back to
  // asking by availability.
  double mass = 0.0;
  for (double x : p) mass += x;
  if (mass <= 0.0) {
    return ask_in_order(mas, config, activity, by_availability(mas, runtimes, cands, clock, config.horizon_days),
                        runtimes, clock, rng);
  }
  const int chosen = cands[rng.categorical(std::span<const double>(p))];
  const Draw d = draw_work(mas, config, chosen, activity, rng);
  const auto idx = static_cast<std::size_t>(chosen);
  auto& rt = runtimes[idx];
  const Timestamp from_time = rt.infinite_capacity() ? clock : std::max(clock, rt.queue_tail());
  const auto start = earliest_availability(rt, mas.agents[idx].schedule, from_time, d.duration, d.duration + d.delay,
                                           config.horizon_days);
  if (!start) return std::nullopt;
  return Allocation{chosen, *start, d.duration, d.delay};
}

std::string RunMetadata::to_json(bool include_wall_clock) const {
  nlohmann::json j = {{"seed", seed},
                      {"architecture", architecture_name(architecture)},
                      {"assignment", assignment_name(assignment)},
                      {"extraneous_delays", use_extraneous_delays},
                      {"evaluation_mode", evaluation_mode},
                      {"n_cases", n_cases},
                      {"arrivals", arrivals},
                      {"completed", completed},
                      {"forced_allocations", forced_allocations},
                      {"warnings", warnings}};
  if (include_wall_clock) j["wall_clock_seconds"] = wall_clock_seconds;
  return j.dump(1);
}

namespace {

class Simulator {
 public:
  Simulator(const Mas& mas, const SimulationConfig& config)
      : mas_(mas),
        config_(config),
        rng_(config.seed),
        model_(config.architecture == Architecture::Orchestrated ? mas.global_transitions : mas.local_transitions),
        horizon_(static_cast<std::int64_t>(config.horizon_days) * kSecondsPerDay),
        slot_(Schedule::full_time(mas.options.granularity_minutes)) {
    for (const auto& a : mas.agents) runtimes_.emplace_back(a.is_dummy);
    for (std::size_t act = 0; act < mas.activities.size(); ++act) {
      candidates_.push_back(mas.candidates(static_cast<int>(act)));
    }
  }

  SimulationResult run();

 private:
  bool arrivals_open() const {
    return config_.evaluation_mode ? arrivals_ < config_.n_cases : completed_.size() < config_.n_cases;
  }
  void spawn_arrivals();
  // Returns false when the case could not be served now.
  bool step_case(std::size_t idx, bool& rerun);
  void execute(CaseState& c, int activity, const Allocation& alloc);
  void force_allocation(std::size_t idx);
  EventLog build_log() const;

  const Mas& mas_;
  const SimulationConfig& config_;
  Rng rng_;
  const TransitionModel& model_;
  Seconds horizon_;
  Schedule slot_;
  std::vector<AgentRuntime> runtimes_;
  std::vector<std::vector<int>> candidates_;

  std::vector<CaseState> cases_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> completed_;
  std::size_t arrivals_ = 0;
  std::size_t forced_ = 0;
  Timestamp clock_{};
  Timestamp next_arrival_{};
  Timestamp last_progress_{};
  std::vector<std::string> warnings_;
};

void Simulator::spawn_arrivals() {
  std::size_t spawned = 0;
  while (arrivals_open() && next_arrival_ <= clock_ && spawned < config_.n_cases) {
    CaseState c;
    c.arrival_order = arrivals_++;
    c.arrived_at = next_arrival_;
    c.enabled_at = next_arrival_;
    cases_.push_back(std::move(c));
    active_.push_back(cases_.size() - 1);
    ++spawned;
    next_arrival_ += sample_seconds(mas_.interarrival, rng_);
  }
}

void Simulator::execute(CaseState& c, int activity, const Allocation& alloc) {
  const Timestamp end = alloc.start + alloc.duration + alloc.delay;
  auto& rt = runtimes_[static_cast<std::size_t>(alloc.agent)];
  rt.occupy(alloc.start, end);
  if (config_.assignment == Assignment::Direct && !rt.infinite_capacity()) rt.pending_queue.emplace_back(alloc.start, end);
  c.events.push_back({activity, alloc.agent, alloc.start, end});
  c.prefix.push_back(activity);
  c.last_agent = alloc.agent;
  c.pending_activity.reset();
  c.enabled_at = end;
  last_progress_ = clock_;
}

bool Simulator::step_case(std::size_t idx, bool& rerun) {
  CaseState& c = cases_[idx];
  if (!c.pending_activity) {
    const std::optional<int> agent =
        model_.scope() == BehaviorScope::Local && !c.prefix.empty() ? c.last_agent : std::nullopt;
    const int act = next_activity(model_, c.prefix, agent, rng_);
    if (act == kEndActivity) {
      completed_.push_back(idx);
      active_.erase(std::find(active_.begin(), active_.end(), idx));
      last_progress_ = clock_;
      return true;
    }
    c.pending_activity = act;
  }
  const int act = *c.pending_activity;
  const auto alloc = select_agent(mas_, config_, act, candidates_[static_cast<std::size_t>(act)], c, runtimes_,
                                  clock_, rng_);
  if (!alloc) return false;
  execute(c, act, *alloc);
  if (c.enabled_at <= clock_) rerun = true;
  return true;
}

void Simulator::force_allocation(std::size_t idx) {
  CaseState& c = cases_[idx];
  const int act = *c.pending_activity;
  int best = -1;
  Timestamp best_t = Timestamp::max();
  for (int a : candidates_[static_cast<std::size_t>(act)]) {
    const Timestamp t = runtimes_[static_cast<std::size_t>(a)].earliest_free(clock_, Seconds{0});
    if (t < best_t) {
      best_t = t;
      best = a;
    }
  }
  const Draw d = draw_work(mas_, config_, best, act, rng_);
  const Timestamp start = runtimes_[static_cast<std::size_t>(best)].earliest_free(clock_, d.duration + d.delay);
  execute(c, act, Allocation{best, start, d.duration, d.delay});
  ++forced_;
  warnings_.push_back("case " + std::to_string(c.arrival_order + 1) + ": activity '" +
                      mas_.activities[static_cast<std::size_t>(act)] + "' forced onto agent '" +
                      mas_.agents[static_cast<std::size_t>(best)].name + "' at " + format_timestamp(start) +
                      " after " + std::to_string(config_.horizon_days) + " days without progress");
}

EventLog Simulator::build_log() const {
  std::size_t width = 1;
  for (std::size_t n = arrivals_; n >= 10; n /= 10) ++width;
  std::vector<Trace> traces;
  traces.reserve(config_.n_cases);
  for (std::size_t k = 0; k < completed_.size() && k < config_.n_cases; ++k) {
    const CaseState& c = cases_[completed_[k]];
    std::string id = std::to_string(c.arrival_order + 1);
    if (id.size() < width) id.insert(0, width - id.size(), '0');
    Trace t;
    t.case_id = "sim-" + id;
    for (const auto& e : c.events) {
      const Agent& agent = mas_.agents[static_cast<std::size_t>(e.agent)];
      Event ev;
      ev.activity = mas_.activities[static_cast<std::size_t>(e.activity)];
      ev.start = e.start;
      ev.end = e.end;
      // Dummy agents stand for events that had no resource.
      if (!agent.is_dummy) ev.resource = agent.name;
      t.events.push_back(std::move(ev));
    }
    traces.push_back(std::move(t));
  }
  return EventLog(std::move(traces));
}

SimulationResult Simulator::run() {
  const auto wall_start = std::chrono::steady_clock::now();
  clock_ = config_.start_time;
  next_arrival_ = config_.start_time;
  last_progress_ = clock_;
  const Timestamp never = Timestamp::max();

  while (completed_.size() < config_.n_cases) {
    spawn_arrivals();

    std::vector<std::size_t> ready;
    for (std::size_t idx : active_) {
      if (cases_[idx].enabled_at <= clock_) ready.push_back(idx);
    }
    std::sort(ready.begin(), ready.end(), [&](std::size_t a, std::size_t b) {
      const auto& x = cases_[a];
      const auto& y = cases_[b];
      return x.enabled_at != y.enabled_at ? x.enabled_at < y.enabled_at : x.arrival_order < y.arrival_order;
    });

    bool rerun = false;
    std::vector<std::size_t> blocked;
    for (std::size_t idx : ready) {
      if (!step_case(idx, rerun)) blocked.push_back(idx);
      if (completed_.size() >= config_.n_cases) break;
    }
    if (completed_.size() >= config_.n_cases) break;

    if (!blocked.empty() && clock_ - last_progress_ >= horizon_) {
      force_allocation(blocked.front());
      continue;
    }

    Timestamp next = never;
    if (rerun) next = clock_;
    if (arrivals_open()) next = std::min(next, std::max(next_arrival_, clock_));
    for (std::size_t idx : active_) {
      const Timestamp t = cases_[idx].enabled_at;
      if (t > clock_) next = std::min(next, t);
    }
    if (!blocked.empty()) {
      next = std::min(next, slot_.next_slot_boundary(clock_));
      next = std::min(next, last_progress_ + horizon_);
    }
    if (next == never) throw Error(ErrorCode::Internal, "simulation stalled with unfinished cases");
    if (next > clock_) {
      for (auto& rt : runtimes_) rt.release_before(next);
    }
    clock_ = next;
  }

  SimulationResult result{build_log(), {}, {}};
  for (std::size_t k = 0; k < completed_.size() && k < config_.n_cases; ++k)
    result.arrivals.push_back(cases_[completed_[k]].arrived_at);
  auto& m = result.meta;
  m.seed = config_.seed;
  m.architecture = config_.architecture;
  m.assignment = config_.assignment;
  m.use_extraneous_delays = config_.use_extraneous_delays;
  m.evaluation_mode = config_.evaluation_mode;
  m.n_cases = config_.n_cases;
  m.arrivals = arrivals_;
  m.completed = completed_.size();
  m.forced_allocations = forced_;
  m.warnings = warnings_;
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

}  // namespace

SimulationResult simulate(const Mas& mas, const SimulationConfig& config) {
  config.validate();
  mas.validate();
  if (config.architecture == Architecture::Autonomous && mas.handovers.size() != mas.agents.size()) {
    throw Error(ErrorCode::Model, "handover matrix does not match the agent set");
  }
  return Simulator(mas, config).run();
}

}  // namespace procsim
