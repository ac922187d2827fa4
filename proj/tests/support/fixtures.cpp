#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "procsim/rng.hpp"
#include "procsim/time.hpp"

namespace fixtures {

using procsim::Seconds;
using procsim::epoch_seconds;
using procsim::from_epoch_seconds;

Timestamp at(std::string_view iso) {
  const auto t = procsim::parse_timestamp(iso);
  if (!t) throw std::invalid_argument("bad timestamp in fixture: " + std::string(iso));
  return *t;
}

LogBuilder& LogBuilder::add(const std::string& case_id, const std::string& activity, std::string_view start,
                            std::string_view end, std::optional<std::string> resource) {
  return add(case_id, activity, at(start), at(end), std::move(resource));
}

LogBuilder& LogBuilder::add(const std::string& case_id, const std::string& activity, Timestamp start, Timestamp end,
                            std::optional<std::string> resource) {
  auto it = std::find_if(traces_.begin(), traces_.end(), [&](const auto& t) { return t.case_id == case_id; });
  if (it == traces_.end()) {
    traces_.push_back({case_id, {}});
    it = std::prev(traces_.end());
  }
  it->events.push_back({activity, start, end, std::move(resource)});
  return *this;
}

EventLog LogBuilder::build() const { return EventLog(traces_); }

namespace {

constexpr std::int64_t kDay = 86400;
constexpr std::int64_t kOpen = 9 * 3600;
constexpr std::int64_t kClose = 17 * 3600;

// Weekday calendar 09:00-17:00 on the given days (bit k = Monday + k).
struct Calendar {
  unsigned days = 0x1f;

  bool works_on(std::int64_t s) const {
    const auto day = static_cast<int>(procsim::weekday_index(from_epoch_seconds(s)));
    return (days >> day) & 1u;
  }
  static std::int64_t day_start(std::int64_t s) { return s - (((s % kDay) + kDay) % kDay); }

  // Earliest s' >= s where work of `len` seconds fits in one shift.
  std::int64_t place(std::int64_t s, std::int64_t len) const {
    for (int guard = 0; guard < 30; ++guard) {
      const std::int64_t d0 = day_start(s);
      if (works_on(s)) {
        const std::int64_t open = d0 + kOpen;
        const std::int64_t close = d0 + kClose;
        const std::int64_t cand = std::max(s, open);
        if (cand + len <= close) return cand;
      }
      s = d0 + kDay;
    }
    throw std::logic_error("calendar without working days");
  }

  // s advanced by `work` seconds of working time.
  std::int64_t add_working(std::int64_t s, std::int64_t work) const {
    s = place(s, 0);
    while (true) {
      const std::int64_t close = day_start(s) + kClose;
      if (s + work <= close) return s + work;
      work -= close - s;
      s = place(day_start(s) + kDay, 0);
    }
  }
};

class Busy {
 public:
  // Earliest start >= s with [start, start+len) free and within the calendar.
  std::int64_t earliest(std::int64_t s, std::int64_t len, const Calendar& cal) const {
    while (true) {
      s = cal.place(s, len);
      bool moved = false;
      for (const auto& [b, e] : spans_) {
        if (e <= s) continue;
        if (b >= s + std::max<std::int64_t>(len, 1)) break;
        s = e;
        moved = true;
        break;
      }
      if (!moved) return s;
    }
  }
  void occupy(std::int64_t b, std::int64_t e) {
    if (e > b) spans_.emplace(b, e);
  }

 private:
  std::map<std::int64_t, std::int64_t> spans_;
};

}  // namespace

EventLog synthesize(const SyntheticSpec& spec) {
  if (spec.activities < 2 || spec.resources < 1 || spec.cases < 1) throw std::invalid_argument("bad synthetic spec");
  procsim::Rng rng(spec.seed);
  auto u = [&] { return rng.uniform(); };

  const std::size_t m = spec.activities;
  const std::size_t n_res = spec.resources;

  // Roles: contiguous activity groups of two; resources assigned round-robin.
  const std::size_t groups = std::max<std::size_t>(1, std::min(n_res, (m + 1) / 2));
  std::vector<std::vector<std::size_t>> pool(groups);
  for (std::size_t r = 0; r < n_res; ++r) pool[r % groups].push_back(r);
  auto group_of = [&](std::size_t act) { return std::min(groups - 1, act * groups / m); };

  std::vector<Calendar> cal(n_res);
  std::vector<double> speed(n_res);
  for (std::size_t r = 0; r < n_res; ++r) {
    cal[r].days = (r % 5 == 4) ? 0x07u : 0x1fu;  // every fifth resource part-time Mon-Wed
    speed[r] = 0.6 + 0.9 * u();                   // junior/senior spread
  }
  std::vector<double> act_mean(m);
  for (std::size_t a = 0; a < m; ++a) act_mean[a] = spec.mean_duration_minutes * 60.0 * (0.4 + 1.2 * u());
  std::vector<bool> delayed(m);
  for (std::size_t a = 0; a < m; ++a) delayed[a] = u() < 0.3;

  // Walk shape.
  const double ratio = static_cast<double>(m) / spec.mean_trace_length;
  std::size_t skip = 1;
  double p_skip = 0.0;
  double p_back = 0.0;
  if (ratio > 1.0) {
    skip = static_cast<std::size_t>(std::ceil(ratio - 1.0));
    p_skip = (ratio - 1.0) / static_cast<double>(skip);
  } else {
    p_back = (1.0 - ratio) / 2.0;
  }

  std::vector<Busy> busy(n_res);
  Calendar office;
  std::int64_t arrival = epoch_seconds(at(spec.start));
  std::vector<procsim::Trace> traces;
  traces.reserve(spec.cases);
  const std::size_t width = std::to_string(spec.cases).size();

  for (std::size_t c = 0; c < spec.cases; ++c) {
    if (c > 0) {
      const double gap = -std::log(1.0 - u()) * spec.mean_interarrival_minutes * 60.0;
      arrival = office.add_working(arrival, static_cast<std::int64_t>(gap));
    }
    std::string id = std::to_string(c + 1);
    id.insert(0, width - id.size(), '0');
    procsim::Trace trace{"case-" + id, {}};

    std::int64_t enabled = arrival;
    std::optional<std::size_t> prev_res;
    std::size_t act = 0;
    for (std::size_t steps = 0; act < m && steps < 4 * m; ++steps) {
      const bool system = act >= m - spec.unassigned_activities && u() < 0.5;
      procsim::Event ev;
      ev.activity = "A" + std::string(act < 10 ? "0" : "") + std::to_string(act);
      if (system) {
        ev.start = from_epoch_seconds(enabled);
        ev.end = ev.start;
      } else {
        const auto& p = pool[group_of(act)];
        std::size_t r = p[static_cast<std::size_t>(u() * static_cast<double>(p.size())) % p.size()];
        if (prev_res && u() < 0.7) r = p[*prev_res % p.size()];
        const double sigma = 0.5;
        const double mu = std::log(act_mean[act] * speed[r]) - sigma * sigma / 2.0;
        const double u1 = u();
        const double u2 = u();
        const double z = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * M_PI * u2);
        const auto len = static_cast<std::int64_t>(std::clamp(std::exp(mu + sigma * z), 30.0, 7.0 * 3600.0));
        std::int64_t ready = enabled;
        if (delayed[act] && u() < spec.delay_probability) {
          ready += static_cast<std::int64_t>(-std::log(1.0 - u()) * 7200.0);
        }
        const std::int64_t s = busy[r].earliest(ready, len, cal[r]);
        busy[r].occupy(s, s + len);
        ev.start = from_epoch_seconds(s);
        ev.end = from_epoch_seconds(s + len);
        ev.resource = "R" + std::string(r < 10 ? "0" : "") + std::to_string(r);
        prev_res = r;
      }
      enabled = epoch_seconds(ev.end);
      trace.events.push_back(std::move(ev));

      const double x = u();
      if (act > 0 && x < p_back) {
        --act;
      } else if (x < p_back + p_skip) {
        act += 1 + skip;
      } else {
        ++act;
      }
    }
    traces.push_back(std::move(trace));
  }
  return EventLog(std::move(traces));
}

SyntheticSpec loan_spec() {
  SyntheticSpec s;
  s.name = "loan";
  s.cases = 1000;
  s.activities = 12;
  s.resources = 19;
  s.mean_trace_length = 7.5;
  s.mean_interarrival_minutes = 20.0;
  s.mean_duration_minutes = 12.0;
  s.seed = 20240601;
  return s;
}

SyntheticSpec production_spec() {
  SyntheticSpec s;
  s.name = "production";
  s.cases = 225;
  s.activities = 24;
  s.resources = 41;
  s.mean_trace_length = 20.0;
  s.mean_interarrival_minutes = 240.0;
  s.mean_duration_minutes = 60.0;
  s.seed = 4503;
  return s;
}

std::vector<SyntheticSpec> benchmark_style_specs() {
  auto make = [](std::string name, std::size_t acts, std::size_t res, double len, std::size_t unassigned,
                 std::uint64_t seed) {
    SyntheticSpec s;
    s.name = std::move(name);
    s.cases = 150;
    s.activities = acts;
    s.resources = res;
    s.mean_trace_length = len;
    s.unassigned_activities = unassigned;
    s.seed = seed;
    return s;
  };
  return {make("loan_application", 12, 19, 7.5, 0, 1),
          make("p2p", 21, 27, 15.0, 0, 2),
          make("cvs", 15, 6, 10.4, 2, 3),
          make("confidential_1000", 42, 14, 38.2, 12, 4),
          make("confidential_2000", 42, 14, 38.7, 12, 5),
          make("acr", 18, 432, 7.2, 0, 6),
          make("production", 24, 41, 20.0, 0, 7),
          make("bpi12w", 6, 52, 6.9, 4, 8),
          make("bpi17w", 8, 136, 8.0, 0, 9)};
}

}  // namespace fixtures
