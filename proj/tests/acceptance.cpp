// Acceptance harness: one PASS/FAIL line per criterion. Criterion 8 is
// report-only and prints WARN instead of failing.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "procsim/discovery.hpp"
#include "procsim/distributions.hpp"
#include "procsim/metrics.hpp"
#include "procsim/model_io.hpp"
#include "procsim/pipeline.hpp"
#include "procsim/simulation.hpp"
#include "procsim/time.hpp"

using namespace procsim;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kSelfDistanceSeconds = 1.0;
constexpr double kW1Tolerance = 1e-9;
constexpr std::size_t kRecoverySamples = 10000;
constexpr double kRecoveryMeanTolerance = 0.05;
constexpr double kAnchorNgd = 0.25;
constexpr double kAnchorCtdHours = 1.49;
constexpr double kAnchorCtdFactor = 10.0;
constexpr double kPipelineSeconds = 120.0;
constexpr double kWeekShiftAed = 0.5;
constexpr double kWeekShiftOther = 1e-9;

struct Outcome {
  bool ok = true;
  std::string detail;
};

int hard_failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body, bool report_only = false) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const char* tag = o.ok ? "PASS" : (report_only ? "WARN" : "FAIL");
  if (!o.ok && !report_only) ++hard_failures;
  std::printf("[%s] %2d %s: %s\n", tag, id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string csv(const EventLog& log) {
  std::ostringstream out;
  write_log(log, out);
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EventLog shifted(const EventLog& log, Seconds by) {
  auto traces = log.traces();
  for (auto& t : traces)
    for (auto& e : t.events) {
      e.start += by;
      e.end += by;
    }
  return EventLog(std::move(traces));
}

// 1 -------------------------------------------------------------------------

Outcome self_distance() {
  Outcome o;
  double worst = 0.0;
  for (const auto& spec : fixtures::benchmark_style_specs()) {
    const auto log = fixtures::synthesize(spec);
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = evaluate(log, log);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, secs);
    if (m.ngd != 0.0 || m.aed != 0.0 || m.ced != 0.0 || m.red != 0.0 || m.ctd != 0.0) {
      o.ok = false;
      o.detail += spec.name + " nonzero; ";
    }
    if (secs >= kSelfDistanceSeconds) {
      o.ok = false;
      o.detail += spec.name + " took " + std::to_string(secs) + " s; ";
    }
  }
  o.detail += "9 fixtures, slowest " + std::to_string(worst) + " s";
  return o;
}

// 2 -------------------------------------------------------------------------

EventLog log_of(const std::vector<std::vector<std::string>>& cases) {
  fixtures::LogBuilder b;
  auto t = fixtures::at("2023-01-02T00:00:00Z");
  int c = 0;
  for (const auto& events : cases) {
    const std::string id = "c" + std::to_string(c++);
    for (const auto& tok : events) {
      const auto at_sign = tok.find('@');
      std::optional<std::string> res;
      if (at_sign != std::string::npos) res = tok.substr(at_sign + 1);
      b.add(id, tok.substr(0, at_sign), t, t + Seconds{1800}, res);
      t += Seconds{3600};
    }
  }
  return b.build();
}

using RatioMap = std::map<std::string, oracles::Ratio>;

RatioMap as_ratios(const NextCounts* c, const Mas& mas) {
  RatioMap out;
  if (!c) return out;
  for (const auto& [act, n] : c->counts)
    out[act == kEndActivity ? oracles::kEnd : mas.activities[static_cast<std::size_t>(act)]] = {n, c->total};
  return out;
}

bool same(const RatioMap& a, const RatioMap& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, r] : b) {
    auto it = a.find(k);
    if (it == a.end() || !(it->second == r)) return false;
  }
  return true;
}

// Returns the number of mismatching comparisons; counts comparisons made.
std::size_t compare_with_oracle(const EventLog& log, std::size_t& checked) {
  const auto mas = discover_mas(log).mas;
  std::vector<oracles::Sequence> frontier{{}};
  std::size_t bad = 0;
  for (int len = 1; len <= 4; ++len) {
    std::vector<oracles::Sequence> next;
    for (const auto& s : frontier)
      for (const auto& a : mas.activities) {
        auto p = s;
        p.push_back(a);
        next.push_back(p);
      }
    for (const auto& p : next) {
      std::vector<int> key;
      for (const auto& a : p) key.push_back(mas.activity_id(a));
      auto cmp = [&](const NextCounts* got, const RatioMap& want) {
        ++checked;
        if (!same(as_ratios(got, mas), want)) ++bad;
      };
      cmp(mas.global_transitions.prefix_counts(key, std::nullopt), oracles::prefix_distribution(log, p));
      cmp(mas.global_transitions.window_counts(key, std::nullopt), oracles::window_distribution(log, p));
      cmp(mas.global_transitions.lookup(key, std::nullopt).counts, oracles::backoff_distribution(log, p));
      for (const auto& agent : mas.agents) {
        cmp(mas.local_transitions.prefix_counts(key, agent.id), oracles::prefix_distribution(log, p, agent.name));
        cmp(mas.local_transitions.lookup(key, agent.id).counts, oracles::backoff_distribution(log, p, agent.name));
      }
    }
    frontier = std::move(next);
  }
  for (const auto& from : mas.agents)
    for (const auto& to : mas.agents) {
      ++checked;
      const auto f = static_cast<std::size_t>(from.id), t = static_cast<std::size_t>(to.id);
      if (!(oracles::Ratio{mas.handovers.count(f, t), mas.handovers.row_total(f)} ==
            oracles::handover(log, from.name, to.name)))
        ++bad;
    }
  return bad;
}

Outcome probability_oracles() {
  const std::vector<EventLog> logs{
      log_of({{"receive@Maria", "check credit@Angela", "assess@Patrick"},
              {"receive@Steve", "check credit@Angela", "assess@Patrick"},
              {"receive@Maria", "check credit@Maria", "assess@Maria"}}),
      log_of({{"receive@Angela", "check credit@Angela", "assess@Patrick", "notify@Patrick"},
              {"receive@Angela", "check credit@Angela", "assess@Patrick", "notify@Patrick"},
              {"receive@Maria", "assess@Maria", "check credit@Patrick", "notify@Patrick"},
              {"receive@Maria", "assess@Maria", "notify@Maria"}}),
      log_of({{"a@r1", "b", "c@r2", "b", "c@r1"},
              {"a@r2", "c@r2", "b"},
              {"a@r1", "b", "b", "d@r1"},
              {"d@r2", "a@r1", "c@r1"},
              {"a@r1", "b", "c@r2", "d@r2"}}),
  };
  Outcome o;
  std::size_t checked = 0, bad = 0;
  for (const auto& log : logs) bad += compare_with_oracle(log, checked);

  const auto mas = discover_mas(logs[0]).mas;
  auto id = [&](const std::string& n) {
    for (const auto& a : mas.agents)
      if (a.name == n) return static_cast<std::size_t>(a.id);
    throw std::logic_error("no agent " + n);
  };
  const double p_patrick = mas.handovers.probability(id("Angela"), id("Patrick"));
  const double p_maria = mas.handovers.probability(id("Angela"), id("Maria"));
  o.ok = bad == 0 && p_patrick == 1.0 && p_maria == 0.0;
  o.detail = std::to_string(checked - bad) + "/" + std::to_string(checked) + " exact; P(Patrick|Angela)=" +
             std::to_string(p_patrick) + " P(Maria|Angela)=" + std::to_string(p_maria);
  return o;
}

// 3 -------------------------------------------------------------------------

Outcome wasserstein_oracle() {
  std::mt19937_64 gen(314159);
  std::uniform_int_distribution<int> size(1, 20);
  std::uniform_real_distribution<double> value(-50.0, 150.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a(static_cast<std::size_t>(size(gen))), b(static_cast<std::size_t>(size(gen)));
    for (auto& x : a) x = value(gen);
    for (auto& x : b) x = value(gen);
    worst = std::max(worst, std::abs(wasserstein_1d(a, b) - oracles::transport_w1(a, b)));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "100 pairs, max |diff| = %.3g (tolerance %.0e)", worst, kW1Tolerance);
  return {worst <= kW1Tolerance, buf};
}

// 4 -------------------------------------------------------------------------

Outcome determinism(const fs::path& work) {
  const auto log = fixtures::synthesize(fixtures::benchmark_style_specs()[2]);
  save_log(log, work / "det_input.csv");
  std::vector<std::map<std::string, std::string>> outputs;
  for (int rep = 0; rep < 2; ++rep) {
    PipelineConfig cfg;
    cfg.log_path = work / "det_input.csv";
    cfg.num_runs = 3;
    cfg.seed = 11;
    cfg.threads = rep == 0 ? 0 : 1;
    cfg.output_dir = work / ("det_" + std::to_string(rep));
    fs::remove_all(cfg.output_dir);
    run_pipeline(cfg);
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(cfg.output_dir)) files[e.path().filename().string()] = slurp(e.path());
    outputs.push_back(std::move(files));
  }
  const bool ok = outputs[0] == outputs[1] && outputs[0].count("sim_2.csv") && outputs[0].count("report.csv");
  return {ok, std::to_string(outputs[0].size()) + " files compared byte for byte"};
}

// 5 -------------------------------------------------------------------------

Outcome contention() {
  const auto log = fixtures::LogBuilder()
                       .add("1", "work", "2023-01-02T09:00:00Z", "2023-01-02T10:00:00Z", "solo")
                       .add("2", "work", "2023-01-02T10:00:00Z", "2023-01-02T11:00:00Z", "solo")
                       .build();
  auto mas = discover_mas(log).mas;
  mas.interarrival = FittedDistribution::fixed(0);
  for (auto& a : mas.agents) a.schedule = Schedule::full_time();
  SimulationConfig cfg;
  cfg.n_cases = 2;
  cfg.seed = 1;
  cfg.start_time = fixtures::at("2023-01-02T00:00:00Z");
  const auto res = simulate(mas, cfg);
  std::vector<std::int64_t> cts;
  // Arrival to exit: the queued case's wait precedes its first event.
  for (std::size_t k = 0; k < res.log.num_cases(); ++k)
    cts.push_back(epoch_seconds(res.log.traces()[k].last_end()) - epoch_seconds(res.arrivals.at(k)));
  std::sort(cts.begin(), cts.end());
  std::string d = "cycle times {";
  for (std::size_t i = 0; i < cts.size(); ++i) d += (i ? ", " : "") + std::to_string(cts[i]);
  return {cts == std::vector<std::int64_t>{3600, 7200}, d + "} s"};
}

// 6 -------------------------------------------------------------------------

Outcome recovery() {
  struct Case {
    Family family;
    double mean;
    std::function<double(std::mt19937_64&)> draw;
  };
  const std::vector<Case> cases{
      {Family::Fixed, 300.0, [](std::mt19937_64&) { return 300.0; }},
      {Family::Normal, 1800.0, [](std::mt19937_64& g) { return std::normal_distribution<double>(1800.0, 300.0)(g); }},
      {Family::Exponential, 900.0,
       [](std::mt19937_64& g) { return std::exponential_distribution<double>(1.0 / 900.0)(g); }},
      {Family::Uniform, 400.0, [](std::mt19937_64& g) { return std::uniform_real_distribution<double>(100.0, 700.0)(g); }},
  };
  Outcome o;
  std::uint64_t seed = 2718;
  for (const auto& c : cases) {
    std::mt19937_64 gen(seed++);
    std::vector<double> xs(kRecoverySamples);
    for (auto& x : xs) x = c.draw(gen);
    const auto fit = fit_distribution(xs);
    const double rel = std::abs(fit.mean() - c.mean) / c.mean;
    const bool ok = fit.family == c.family && rel <= kRecoveryMeanTolerance;
    o.ok = o.ok && ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s->%s (mean err %.2f%%)", o.detail.empty() ? "" : "; ",
                  std::string(family_name(c.family)).c_str(), std::string(family_name(fit.family)).c_str(),
                  100.0 * rel);
    o.detail += buf;
  }
  return o;
}

// 7, 8 ----------------------------------------------------------------------

const Agent* agent_named(const Mas& mas, const std::optional<std::string>& res, const std::string& activity) {
  const std::string label = res ? *res : dummy_label(activity);
  for (const auto& a : mas.agents)
    if (a.name == label) return &a;
  return nullptr;
}

bool replays(const Mas& mas, Architecture arch, const Trace& t) {
  const auto& model = arch == Architecture::Orchestrated ? mas.global_transitions : mas.local_transitions;
  std::vector<int> prefix;
  std::optional<int> last;
  for (std::size_t k = 0; k <= t.events.size(); ++k) {
    const int next = k < t.events.size() ? mas.activity_id(t.events[k].activity) : kEndActivity;
    const auto hit = model.lookup(prefix, prefix.empty() ? std::nullopt : last);
    if (!hit.counts || hit.counts->count(next) == 0) return false;
    if (k == t.events.size()) break;
    prefix.push_back(next);
    const auto* a = agent_named(mas, t.events[k].resource, t.events[k].activity);
    if (!a) return false;
    last = a->id;
  }
  return true;
}

struct LoanRun {
  PipelineResult result;
  fs::path dir;
  std::string source;
};

LoanRun run_loan(const fs::path& work) {
  LoanRun r;
  fs::path input;
  if (const char* env = std::getenv("PROCSIM_LOAN_LOG"); env && *env) {
    input = env;
    r.source = "PROCSIM_LOAN_LOG=" + input.string();
  } else {
    input = work / "loan_standin.csv";
    save_log(fixtures::synthesize(fixtures::loan_spec()), input);
    r.source = "synthetic stand-in";
  }
  PipelineConfig cfg;
  cfg.log_path = input;
  cfg.num_runs = 10;
  cfg.seed = 42;
  cfg.output_dir = r.dir = work / "loan";
  fs::remove_all(cfg.output_dir);
  r.result = run_pipeline(cfg);
  return r;
}

Outcome loan_validity(const LoanRun& run) {
  const auto mas = load_model(run.dir / "model.json");
  const auto& res = run.result;
  std::size_t sizes_ok = 0, bad_events = 0, bad_replay = 0, overlaps = 0, events = 0;
  for (int k = 0; k < static_cast<int>(res.runs.size()); ++k) {
    const auto sim = read_log(run.dir / ("sim_" + std::to_string(k) + ".csv"));
    if (sim.num_cases() == res.test_cases) ++sizes_ok;
    std::map<std::string, std::vector<std::pair<Timestamp, Timestamp>>> by_agent;
    for (const auto& t : sim.traces()) {
      if (!replays(mas, res.architecture, t)) ++bad_replay;
      for (const auto& e : t.events) {
        ++events;
        const auto* a = agent_named(mas, e.resource, e.activity);
        if (e.end < e.start || !a || !a->capabilities.can_perform(mas.activity_id(e.activity))) {
          ++bad_events;
          continue;
        }
        if (!a->is_dummy) by_agent[a->name].emplace_back(e.start, e.end);
      }
    }
    for (auto& [_, spans] : by_agent) {
      std::sort(spans.begin(), spans.end());
      for (std::size_t i = 1; i < spans.size(); ++i)
        if (spans[i - 1].second > spans[i].first) ++overlaps;
    }
  }
  Outcome o;
  o.ok = res.test_cases == 200 && sizes_ok == res.runs.size() && bad_events == 0 && bad_replay == 0 && overlaps == 0;
  o.detail = run.source + ": " + std::to_string(sizes_ok) + "/" + std::to_string(res.runs.size()) + " logs with " +
             std::to_string(res.test_cases) + " cases; " + std::to_string(events) + " events, " +
             std::to_string(bad_events) + " invalid, " + std::to_string(overlaps) + " overlaps, " +
             std::to_string(bad_replay) + " unreplayable traces";
  return o;
}

Outcome loan_anchor(const LoanRun& run) {
  const auto& m = run.result.mean;
  const double lo = kAnchorCtdHours / kAnchorCtdFactor, hi = kAnchorCtdHours * kAnchorCtdFactor;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: mean NGD %.4f (anchor <= %.2f, diff %+.4f), mean CTD %.3f h (range [%.3f, %.1f])",
                run.source.c_str(), m.ngd, kAnchorNgd, m.ngd - kAnchorNgd, m.ctd, lo, hi);
  return {m.ngd <= kAnchorNgd && m.ctd >= lo && m.ctd <= hi, buf};
}

// 9 -------------------------------------------------------------------------

Outcome production_runtime(const fs::path& work) {
  const auto log = fixtures::synthesize(fixtures::production_spec());
  save_log(log, work / "production_standin.csv");
  PipelineConfig cfg;
  cfg.log_path = work / "production_standin.csv";
  cfg.num_runs = 10;
  cfg.output_dir = work / "production";
  fs::remove_all(cfg.output_dir);
  const auto t0 = std::chrono::steady_clock::now();
  run_pipeline(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu traces, %zu events, pipeline %.1f s (limit %.0f s)", log.num_cases(),
                log.num_events(), secs, kPipelineSeconds);
  return {secs < kPipelineSeconds, buf};
}

// 10 ------------------------------------------------------------------------

Outcome week_shift() {
  const auto log = fixtures::synthesize(fixtures::benchmark_style_specs()[0]);
  const auto mas = discover_mas(log).mas;
  SimulationConfig cfg;
  cfg.n_cases = 100;
  cfg.seed = 3;
  cfg.start_time = mas.training_end;
  const auto sim = simulate(mas, cfg).log;
  const auto moved = shifted(sim, Seconds{kSecondsPerWeek});
  const double aed = event_distribution_distance(sim, moved, EventDistribution::Absolute);
  const double ced = event_distribution_distance(sim, moved, EventDistribution::Circadian);
  const double red = event_distribution_distance(sim, moved, EventDistribution::Relative);
  char buf[160];
  std::snprintf(buf, sizeof buf, "AED %.6f, CED %.3g, RED %.3g", aed, ced, red);
  return {std::abs(aed - 168.0) <= kWeekShiftAed && std::abs(ced) <= kWeekShiftOther && std::abs(red) <= kWeekShiftOther,
          buf};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"procsim acceptance checks"};
  fs::path work = fs::temp_directory_path() / "procsim_acceptance";
  app.add_option("--workdir", work, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  report(1, "self-distance", self_distance);
  report(2, "probability oracles", probability_oracles);
  report(3, "wasserstein oracle", wasserstein_oracle);
  report(4, "determinism", [&] { return determinism(work); });
  report(5, "contention", contention);
  report(6, "distribution recovery", recovery);

  std::optional<LoanRun> loan;
  std::string loan_error;
  try {
    loan = run_loan(work);
  } catch (const std::exception& e) {
    loan_error = e.what();
  }
  report(7, "simulated-log validity", [&]() -> Outcome {
    if (!loan) return {false, "pipeline failed: " + loan_error};
    return loan_validity(*loan);
  });
  report(
      8, "anchor check",
      [&]() -> Outcome {
        if (!loan) return {false, "pipeline failed: " + loan_error};
        return loan_anchor(*loan);
      },
      true);
  report(9, "production runtime", [&] { return production_runtime(work); });
  report(10, "week shift", week_shift);

  std::printf("%d hard failure(s)\n", hard_failures);
  return hard_failures == 0 ? 0 : 1;
}
