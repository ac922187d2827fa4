#include "procsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <future>
#include <thread>

#include "procsim/error.hpp"
#include "procsim/model_io.hpp"

namespace procsim {
namespace {

Timestamp earliest_start(const EventLog& log) {
  Timestamp t = Timestamp::max();
  for (const auto& tr : log.traces()) t = std::min(t, tr.first_start());
  return t;
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Internal, std::string(name) + ": " + e.what());
  }
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + p.string() + "' for writing");
  return out;
}

}  // namespace

AutoSelection auto_select_config(const EventLog& train, std::uint64_t seed, const DiscoveryOptions& options) {
  if (train.num_cases() < 5) throw Error(ErrorCode::InvalidArgument, "auto-selection needs at least 5 training cases");
  const SplitResult inner = temporal_split(train, 0.8);
  if (inner.train.num_cases() < 2 || inner.test.empty()) {
    throw Error(ErrorCode::InvalidArgument, "inner split left too few cases for selection");
  }
  const Mas mas = discover_mas(inner.train, options).mas;

  AutoSelection sel;
  const std::array<std::pair<Architecture, bool>, 4> order{{{Architecture::Orchestrated, false},
                                                             {Architecture::Orchestrated, true},
                                                             {Architecture::Autonomous, false},
                                                             {Architecture::Autonomous, true}}};
  for (std::size_t k = 0; k < order.size(); ++k) {
    SimulationConfig cfg;
    cfg.architecture = order[k].first;
    cfg.use_extraneous_delays = order[k].second;
    cfg.n_cases = inner.test.num_cases();
    cfg.start_time = earliest_start(inner.test);
    cfg.evaluation_mode = true;
    cfg.seed = seed;
    const auto sim = simulate(mas, cfg);
    sel.scores[k] = {order[k].first, order[k].second, ctd(inner.test, sim.log)};
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < sel.scores.size(); ++k) {
    if (sel.scores[k].ctd < sel.scores[best].ctd) best = k;
  }
  sel.architecture = sel.scores[best].architecture;
  sel.use_extraneous_delays = sel.scores[best].use_extraneous_delays;
  return sel;
}

void PipelineConfig::validate() const {
  if (num_runs < 1) throw Error(ErrorCode::InvalidArgument, "num_runs must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train_fraction must lie in (0, 1)");
  }
  if (ngram < 2) throw Error(ErrorCode::InvalidArgument, "n-gram size must be at least 2");
  if (output_dir.empty()) throw Error(ErrorCode::InvalidArgument, "output directory required");
  if (assignment == Assignment::Direct && architecture == Architecture::Orchestrated) {
    throw Error(ErrorCode::InvalidArgument, "direct assignment requires the autonomous architecture");
  }
}

MetricsReport mean_report(const std::vector<MetricsReport>& runs) {
  MetricsReport m;
  if (runs.empty()) return m;
  for (const auto& r : runs) {
    m.ngd += r.ngd;
    m.aed += r.aed;
    m.ced += r.ced;
    m.red += r.red;
    m.ctd += r.ctd;
  }
  const double n = static_cast<double>(runs.size());
  m.ngd /= n;
  m.aed /= n;
  m.ced /= n;
  m.red /= n;
  m.ctd /= n;
  return m;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  stage("config", [&] { config.validate(); });
  const auto& dir = config.output_dir;
  stage("output", [&] { std::filesystem::create_directories(dir); });

  const EventLog log = stage("load", [&] { return read_log(config.log_path, config.columns); });
  const SplitResult split = stage("split", [&] {
    auto s = temporal_split(log, config.train_fraction);
    if (s.train.num_cases() < 2 || s.test.empty()) {
      throw Error(ErrorCode::InvalidArgument, "split left too few cases in train or test");
    }
    save_log(s.train, dir / "train.csv");
    save_log(s.test, dir / "test.csv");
    return s;
  });

  PipelineResult result;
  result.train_cases = split.train.num_cases();
  result.test_cases = split.test.num_cases();
  if (!split.dropped.empty()) {
    result.warnings.push_back(std::to_string(split.dropped.size()) + " case(s) spanning the split point dropped");
  }

  DiscoveryResult discovered = stage("discover", [&] { return discover_mas(split.train, config.discovery); });
  for (auto& w : discovered.warnings) result.warnings.push_back(std::move(w));
  Mas& mas = discovered.mas;

  result.architecture = config.architecture.value_or(Architecture::Orchestrated);
  result.use_extraneous_delays = config.use_extraneous_delays.value_or(false);
  if (!config.architecture || !config.use_extraneous_delays) {
    result.selection = stage("select", [&] { return auto_select_config(split.train, config.seed, config.discovery); });
    if (!config.architecture) result.architecture = result.selection->architecture;
    if (!config.use_extraneous_delays) result.use_extraneous_delays = result.selection->use_extraneous_delays;
  }
  result.assignment = result.architecture == Architecture::Autonomous ? config.assignment : Assignment::Iterative;
  mas.architecture = result.architecture;
  mas.assignment = result.assignment;
  mas.use_extraneous_delays = result.use_extraneous_delays;
  stage("save model", [&] { save_model(mas, dir / "model.json"); });

  const Timestamp start = earliest_start(split.test);
  std::vector<SimulationResult> sims(static_cast<std::size_t>(config.num_runs));
  stage("simulate", [&] {
    auto run_one = [&](int k) {
      SimulationConfig cfg;
      cfg.architecture = result.architecture;
      cfg.assignment = result.assignment;
      cfg.use_extraneous_delays = result.use_extraneous_delays;
      cfg.n_cases = split.test.num_cases();
      cfg.start_time = start;
      cfg.evaluation_mode = true;
      cfg.seed = config.seed + static_cast<std::uint64_t>(k);
      sims[static_cast<std::size_t>(k)] = simulate(mas, cfg);
    };
    unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    workers = std::clamp(workers, 1u, static_cast<unsigned>(config.num_runs));
    if (workers == 1) {
      for (int k = 0; k < config.num_runs; ++k) run_one(k);
      return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&] {
        for (int k = next++; k < config.num_runs; k = next++) run_one(k);
      }));
    }
    for (auto& j : jobs) j.get();
  });

  stage("write simulations", [&] {
    for (int k = 0; k < config.num_runs; ++k) {
      const auto& sim = sims[static_cast<std::size_t>(k)];
      save_log(sim.log, dir / ("sim_" + std::to_string(k) + ".csv"));
      for (const auto& w : sim.meta.warnings) result.warnings.push_back("run " + std::to_string(k) + ": " + w);
    }
  });

  stage("evaluate", [&] {
    for (const auto& sim : sims) result.runs.push_back(evaluate(split.test, sim.log, config.ngram));
    result.mean = mean_report(result.runs);
  });

  stage("report", [&] {
    auto csv = open_out(dir / "report.csv");
    write_metrics_csv_header(csv);
    for (int k = 0; k < config.num_runs; ++k) {
      write_metrics_csv_row(csv, "test.csv", "sim_" + std::to_string(k) + ".csv", result.runs[static_cast<std::size_t>(k)]);
    }
    write_metrics_csv_row(csv, "test.csv", "mean", result.mean);

    auto txt = open_out(dir / "report.txt");
    txt << "cases: " << log.num_cases() << " total, " << result.train_cases << " train, " << result.test_cases
        << " test\n";
    txt << "configuration: " << architecture_name(result.architecture) << ", "
        << assignment_name(result.assignment) << ", extraneous delays "
        << (result.use_extraneous_delays ? "on" : "off") << (result.selection ? " (auto-selected)" : "") << '\n';
    if (result.selection) {
      txt << "selection (inner cycle-time distance, h):\n";
      for (const auto& s : result.selection->scores) {
        txt << "  " << architecture_name(s.architecture) << (s.use_extraneous_delays ? "+delays" : "") << "  "
            << s.ctd << '\n';
      }
      auto sel = open_out(dir / "selection.csv");
      sel << "architecture,extraneous_delays,ctd\n";
      for (const auto& s : result.selection->scores) {
        sel << architecture_name(s.architecture) << ',' << (s.use_extraneous_delays ? "on" : "off") << ',' << s.ctd
            << '\n';
      }
    }
    txt << "runs: " << config.num_runs << " (seeds " << config.seed << ".." << config.seed + config.num_runs - 1
        << ")\n\nmean over runs\n";
    write_metrics_text(txt, "test.csv", "sim_*.csv", result.mean);
    if (!result.warnings.empty()) {
      txt << "\nwarnings:\n";
      for (const auto& w : result.warnings) txt << "  " << w << '\n';
    }

    auto it = open_out(dir / "interactions_test.csv");
    write_interaction_matrix(interaction_matrix(split.test), it);
    auto is = open_out(dir / "interactions_sim_0.csv");
    write_interaction_matrix(interaction_matrix(sims.front().log), is);
  });
  return result;
}

}  // namespace procsim
