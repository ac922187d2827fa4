#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "procsim/discovery.hpp"
#include "procsim/event_log.hpp"
#include "procsim/metrics.hpp"
#include "procsim/simulation.hpp"

namespace procsim {

struct ConfigScore {
  Architecture architecture;
  bool use_extraneous_delays;
  double ctd;
};

struct AutoSelection {
  Architecture architecture = Architecture::Orchestrated;
  bool use_extraneous_delays = false;
  // In tie-break order: orchestrated, orchestrated+delays, autonomous,
  // autonomous+delays.
  std::array<ConfigScore, 4> scores{};
};

// Picks architecture and delay usage by the cycle-time distance between the
// last fifth of `train` and a simulation of it from a model discovered on the
// remainder. Strictly smaller CTD wins; ties keep the earlier configuration.
AutoSelection auto_select_config(const EventLog& train, std::uint64_t seed, const DiscoveryOptions& options = {});

struct PipelineConfig {
  std::filesystem::path log_path;
  ColumnMap columns;
  double train_fraction = 0.8;
  int num_runs = 10;
  std::uint64_t seed = 42;
  std::optional<Architecture> architecture;
  std::optional<bool> use_extraneous_delays;
  Assignment assignment = Assignment::Iterative;
  DiscoveryOptions discovery;
  int ngram = 2;
  int threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_dir;

  void validate() const;
};

struct PipelineResult {
  Architecture architecture = Architecture::Orchestrated;
  Assignment assignment = Assignment::Iterative;
  bool use_extraneous_delays = false;
  std::optional<AutoSelection> selection;
  std::size_t train_cases = 0;
  std::size_t test_cases = 0;
  std::vector<MetricsReport> runs;
  MetricsReport mean;
  std::vector<std::string> warnings;
};

MetricsReport mean_report(const std::vector<MetricsReport>& runs);

// Split, discover, select, simulate num_runs times (seeds seed + k) and
// evaluate against the test split. Writes into output_dir:
//   train.csv, test.csv, model.json, sim_<k>.csv, report.csv, report.txt,
//   selection.csv (when auto-selecting), interactions_test.csv,
//   interactions_sim_0.csv
// Errors are rethrown with the failing stage named.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace procsim
