// Command-line front end. Talks to the library only through procsim.h.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "procsim/procsim.h"

namespace {

struct Columns {
  std::string case_id = "case_id";
  std::string activity = "activity";
  std::string start = "start_time";
  std::string end = "end_time";
  std::string resource = "resource";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--case-col", case_id, "Case id column")->capture_default_str();
    cmd->add_option("--activity-col", activity, "Activity column")->capture_default_str();
    cmd->add_option("--start-col", start, "Start timestamp column")->capture_default_str();
    cmd->add_option("--end-col", end, "End timestamp column")->capture_default_str();
    cmd->add_option("--resource-col", resource, "Resource column (empty: none)")->capture_default_str();
  }
  psim_columns view() const {
    return {case_id.c_str(), activity.c_str(), start.c_str(), end.c_str(), resource.c_str()};
  }
};

struct Failure {
  std::string stage;
  std::string message;
};

void check(psim_status s, const std::string& stage) {
  if (s != PSIM_OK) throw Failure{stage, psim_last_error()};
}

void write_text(const std::string& path, const std::string& text, const std::string& stage) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Failure{stage, "cannot write '" + path + "'"};
}

// RAII holders for the C handles.
struct Log {
  psim_log* p = nullptr;
  ~Log() { psim_log_free(p); }
};
struct Model {
  psim_model* p = nullptr;
  ~Model() { psim_model_free(p); }
};
struct Str {
  char* p = nullptr;
  ~Str() { psim_string_free(p); }
};

int parse_architecture(const std::string& s) { return s == "autonomous" ? PSIM_AUTONOMOUS : PSIM_ORCHESTRATED; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based business process simulation: discover, simulate, evaluate"};
  app.set_version_flag("--version", std::string(psim_version()));
  app.require_subcommand(1);

  psim_discovery_options dopt;
  psim_discovery_options_init(&dopt);
  auto add_discovery = [&](CLI::App* cmd) {
    cmd->add_option("--granularity", dopt.granularity_minutes, "Schedule slot length in minutes")
        ->capture_default_str();
    cmd->add_option("--schedule-support", dopt.schedule_support, "Minimum weekly share for a working slot")
        ->capture_default_str();
    cmd->add_option("--type-threshold", dopt.type_threshold, "Cosine distance for agent-type merging")
        ->capture_default_str();
    cmd->add_flag("--type-level-behavior", dopt.type_level_behavior, "Local transitions per agent type");
  };

  // discover
  auto* discover = app.add_subcommand("discover", "Discover a simulation model from an event log");
  std::string log_path, model_out;
  Columns dcols;
  discover->add_option("--log", log_path, "Event log CSV")->required()->check(CLI::ExistingFile);
  discover->add_option("--out", model_out, "Model JSON to write")->required();
  dcols.add_to(discover);
  add_discovery(discover);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate a log from a model");
  std::string model_path, sim_out, architecture, assignment, delays, start;
  std::size_t n_cases = 0;
  std::uint64_t seed = 0;
  bool evaluation = false;
  int horizon = 0;
  simulate->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--n", n_cases, "Number of cases")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Random seed")->required();
  simulate->add_option("--out", sim_out, "Simulated log CSV to write")->required();
  simulate->add_option("--architecture", architecture, "orchestrated|autonomous (default: model's)")
      ->check(CLI::IsMember({"orchestrated", "autonomous"}));
  simulate->add_option("--assignment", assignment, "iterative|direct (default: model's)")
      ->check(CLI::IsMember({"iterative", "direct"}));
  simulate->add_option("--delays", delays, "on|off (default: model's)")->check(CLI::IsMember({"on", "off"}));
  simulate->add_option("--start", start, "First arrival (default: end of the discovery log)");
  simulate->add_option("--horizon-days", horizon, "Days without progress before forcing an allocation")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--evaluation", evaluation, "Spawn exactly n arrivals instead of running until n complete");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compare a simulated log with a reference log");
  std::string real_path, sim_path, report_out, interactions_out;
  int ngram = 2;
  Columns ecols;
  evaluate->add_option("--real", real_path, "Reference log CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--sim", sim_path, "Simulated log CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out", report_out, "Report CSV to write")->required();
  evaluate->add_option("--ngram", ngram, "n-gram size for NGD")->capture_default_str()->check(CLI::Range(2, 16));
  evaluate->add_option("--interactions", interactions_out, "Also write the simulated log's interaction matrix");
  ecols.add_to(evaluate);

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Split, discover, select, simulate and evaluate");
  psim_pipeline_config pcfg;
  psim_pipeline_config_init(&pcfg);
  std::string p_log, p_out, p_arch = "auto", p_delays = "auto", p_assign = "iterative";
  Columns pcols;
  pipeline->add_option("--log", p_log, "Event log CSV")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--out", p_out, "Output directory")->required();
  pipeline->add_option("--runs", pcfg.num_runs, "Simulation runs")->capture_default_str()->check(CLI::PositiveNumber);
  pipeline->add_option("--seed", pcfg.seed, "Seed of run 0; run k uses seed + k")->capture_default_str();
  pipeline->add_option("--train-fraction", pcfg.train_fraction, "Share of cases used for discovery")
      ->capture_default_str()
      ->check(CLI::Range(0.01, 0.99));
  pipeline->add_option("--architecture", p_arch, "auto|orchestrated|autonomous")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "orchestrated", "autonomous"}));
  pipeline->add_option("--delays", p_delays, "auto|on|off")->capture_default_str()->check(CLI::IsMember({"auto", "on", "off"}));
  pipeline->add_option("--assignment", p_assign, "iterative|direct (autonomous only)")
      ->capture_default_str()
      ->check(CLI::IsMember({"iterative", "direct"}));
  pipeline->add_option("--ngram", pcfg.ngram, "n-gram size for NGD")->capture_default_str()->check(CLI::Range(2, 16));
  pipeline->add_option("--threads", pcfg.threads, "Parallel simulation runs (0: all cores)")->capture_default_str();
  pcols.add_to(pipeline);
  add_discovery(pipeline);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*discover) {
      const auto cols = dcols.view();
      Log log;
      check(psim_log_load(log_path.c_str(), &cols, &log.p), "load");
      Model model;
      Str warnings;
      check(psim_model_discover(log.p, &dopt, &model.p, &warnings.p), "discover");
      check(psim_model_save(model.p, model_out.c_str()), "save model");
      std::cout << "discovered " << psim_model_num_agents(model.p) << " agents from " << psim_log_num_cases(log.p)
                << " cases -> " << model_out << '\n';
      if (std::string(warnings.p) != "[]") std::cerr << "warnings: " << warnings.p << '\n';
    } else if (*simulate) {
      Model model;
      check(psim_model_load(model_path.c_str(), &model.p), "load model");
      psim_sim_config cfg;
      check(psim_sim_config_init(&cfg, model.p), "configure");
      if (!architecture.empty()) cfg.architecture = parse_architecture(architecture);
      if (!assignment.empty()) cfg.assignment = assignment == "direct" ? PSIM_DIRECT : PSIM_ITERATIVE;
      if (cfg.architecture == PSIM_ORCHESTRATED && assignment.empty()) cfg.assignment = PSIM_ITERATIVE;
      if (!delays.empty()) cfg.use_extraneous_delays = delays == "on";
      if (!start.empty()) check(psim_parse_timestamp(start.c_str(), &cfg.start_time), "configure");
      if (horizon > 0) cfg.horizon_days = horizon;
      cfg.n_cases = n_cases;
      cfg.seed = seed;
      cfg.evaluation_mode = evaluation ? 1 : 0;
      Log sim;
      Str meta;
      check(psim_simulate(model.p, &cfg, &sim.p, &meta.p), "simulate");
      check(psim_log_save(sim.p, sim_out.c_str()), "write log");
      write_text(sim_out + ".meta.json", std::string(meta.p) + "\n", "write metadata");
      std::cout << "simulated " << psim_log_num_cases(sim.p) << " cases -> " << sim_out << '\n';
    } else if (*evaluate) {
      const auto cols = ecols.view();
      Log real, sim;
      check(psim_log_load(real_path.c_str(), &cols, &real.p), "load reference");
      check(psim_log_load(sim_path.c_str(), nullptr, &sim.p), "load simulation");
      psim_metrics m;
      check(psim_evaluate(real.p, sim.p, ngram, &m), "evaluate");
      check(psim_metrics_write_csv(report_out.c_str(), real_path.c_str(), sim_path.c_str(), &m), "report");
      if (!interactions_out.empty()) check(psim_interaction_matrix_write(sim.p, interactions_out.c_str()), "report");
      Str text;
      check(psim_metrics_format(real_path.c_str(), sim_path.c_str(), &m, &text.p), "report");
      std::cout << text.p;
    } else if (*pipeline) {
      const auto cols = pcols.view();
      pcfg.log_path = p_log.c_str();
      pcfg.output_dir = p_out.c_str();
      pcfg.columns = cols;
      pcfg.discovery = dopt;
      pcfg.architecture = p_arch == "auto" ? -1 : parse_architecture(p_arch);
      pcfg.use_extraneous_delays = p_delays == "auto" ? -1 : (p_delays == "on" ? 1 : 0);
      pcfg.assignment = p_assign == "direct" ? PSIM_DIRECT : PSIM_ITERATIVE;
      psim_metrics mean;
      Str summary;
      check(psim_pipeline_run(&pcfg, &mean, &summary.p), "pipeline");
      std::cout << summary.p;
    }
  } catch (const Failure& f) {
    std::cerr << "procsim: " << f.stage << " failed: " << f.message << '\n';
    return 1;
  }
  return 0;
}
