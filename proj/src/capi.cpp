#include "procsim/procsim.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "procsim/error.hpp"
#include "procsim/event_log.hpp"
#include "procsim/metrics.hpp"
#include "procsim/model_io.hpp"
#include "procsim/pipeline.hpp"
#include "procsim/simulation.hpp"

struct psim_log {
  procsim::EventLog log;
};

struct psim_model {
  procsim::Mas mas;
};

namespace {

thread_local std::string last_error;

psim_status fail(psim_status code, std::string msg) {
  last_error = std::move(msg);
  return code;
}

template <typename F>
psim_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return PSIM_OK;
  } catch (const procsim::Error& e) {
    return fail(static_cast<psim_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PSIM_ERR_INTERNAL, e.what());
  }
}

void need(bool ok, const char* what) {
  if (!ok) throw procsim::Error(procsim::ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

procsim::ColumnMap to_columns(const psim_columns* c) {
  procsim::ColumnMap m;
  if (!c) return m;
  if (c->case_id) m.case_id = c->case_id;
  if (c->activity) m.activity = c->activity;
  if (c->start) m.start = c->start;
  if (c->end) m.end = c->end;
  if (c->resource) m.resource = c->resource;
  return m;
}

procsim::DiscoveryOptions to_options(const psim_discovery_options* o) {
  procsim::DiscoveryOptions d;
  if (!o) return d;
  d.granularity_minutes = o->granularity_minutes;
  d.schedule_support = o->schedule_support;
  d.type_threshold = o->type_threshold;
  d.delay_min_fraction = o->delay_min_fraction;
  d.type_level_behavior = o->type_level_behavior != 0;
  d.max_prefix_len = o->max_prefix_len;
  return d;
}

procsim::Architecture to_architecture(int a) {
  need(a == PSIM_ORCHESTRATED || a == PSIM_AUTONOMOUS, "unknown architecture");
  return a == PSIM_AUTONOMOUS ? procsim::Architecture::Autonomous : procsim::Architecture::Orchestrated;
}

procsim::Assignment to_assignment(int a) {
  need(a == PSIM_ITERATIVE || a == PSIM_DIRECT, "unknown assignment");
  return a == PSIM_DIRECT ? procsim::Assignment::Direct : procsim::Assignment::Iterative;
}

psim_metrics to_c(const procsim::MetricsReport& m) { return {m.ngd, m.aed, m.ced, m.red, m.ctd}; }
procsim::MetricsReport from_c(const psim_metrics& m) { return {m.ngd, m.aed, m.ced, m.red, m.ctd}; }

}  // namespace

extern "C" {

const char* psim_version(void) { return "1.0.0"; }
const char* psim_last_error(void) { return last_error.c_str(); }
void psim_string_free(char* s) { std::free(s); }

psim_status psim_parse_timestamp(const char* text, int64_t* out) {
  return guard([&] {
    need(text && out, "psim_parse_timestamp: null argument");
    const auto t = procsim::parse_timestamp(text);
    if (!t) throw procsim::Error(procsim::ErrorCode::Parse, std::string("invalid timestamp '") + text + "'");
    *out = procsim::epoch_seconds(*t);
  });
}

psim_status psim_log_load(const char* path, const psim_columns* columns, psim_log** out) {
  return guard([&] {
    need(path && out, "psim_log_load: null argument");
    *out = new psim_log{procsim::read_log(path, to_columns(columns))};
  });
}

psim_status psim_log_parse(const char* csv, size_t length, const psim_columns* columns, psim_log** out) {
  return guard([&] {
    need(csv && out, "psim_log_parse: null argument");
    std::istringstream in(std::string(csv, length));
    *out = new psim_log{procsim::parse_log(in, to_columns(columns))};
  });
}

psim_status psim_log_save(const psim_log* log, const char* path) {
  return guard([&] {
    need(log && path, "psim_log_save: null argument");
    procsim::save_log(log->log, path);
  });
}

void psim_log_free(psim_log* log) { delete log; }
size_t psim_log_num_cases(const psim_log* log) { return log ? log->log.num_cases() : 0; }
size_t psim_log_num_events(const psim_log* log) { return log ? log->log.num_events() : 0; }

psim_status psim_log_first_start(const psim_log* log, int64_t* out) {
  return guard([&] {
    need(log && out, "psim_log_first_start: null argument");
    need(!log->log.empty(), "psim_log_first_start: empty log");
    auto t = procsim::Timestamp::max();
    for (const auto& tr : log->log.traces()) t = std::min(t, tr.first_start());
    *out = procsim::epoch_seconds(t);
  });
}

psim_status psim_log_split(const psim_log* log, double train_fraction, psim_log** train, psim_log** test) {
  return guard([&] {
    need(log && train && test, "psim_log_split: null argument");
    auto s = procsim::temporal_split(log->log, train_fraction);
    auto a = std::make_unique<psim_log>(psim_log{std::move(s.train)});
    *test = new psim_log{std::move(s.test)};
    *train = a.release();
  });
}

void psim_discovery_options_init(psim_discovery_options* options) {
  if (!options) return;
  const procsim::DiscoveryOptions d;
  *options = {d.granularity_minutes, d.schedule_support, d.type_threshold, d.delay_min_fraction,
              d.type_level_behavior ? 1 : 0, d.max_prefix_len};
}

psim_status psim_model_discover(const psim_log* log, const psim_discovery_options* options, psim_model** out,
                                char** warnings_json) {
  return guard([&] {
    need(log && out, "psim_model_discover: null argument");
    auto r = procsim::discover_mas(log->log, to_options(options));
    std::string warnings = nlohmann::json(r.warnings).dump();
    auto* m = new psim_model{std::move(r.mas)};
    if (warnings_json) {
      try {
        *warnings_json = dup_string(warnings);
      } catch (...) {
        delete m;
        throw;
      }
    }
    *out = m;
  });
}

psim_status psim_model_load(const char* path, psim_model** out) {
  return guard([&] {
    need(path && out, "psim_model_load: null argument");
    *out = new psim_model{procsim::load_model(path)};
  });
}

psim_status psim_model_save(const psim_model* model, const char* path) {
  return guard([&] {
    need(model && path, "psim_model_save: null argument");
    procsim::save_model(model->mas, path);
  });
}

void psim_model_free(psim_model* model) { delete model; }
size_t psim_model_num_agents(const psim_model* model) { return model ? model->mas.agents.size() : 0; }

psim_status psim_sim_config_init(psim_sim_config* config, const psim_model* model) {
  return guard([&] {
    need(config && model, "psim_sim_config_init: null argument");
    const auto& m = model->mas;
    config->architecture = m.architecture == procsim::Architecture::Autonomous ? PSIM_AUTONOMOUS : PSIM_ORCHESTRATED;
    config->assignment = m.assignment == procsim::Assignment::Direct ? PSIM_DIRECT : PSIM_ITERATIVE;
    config->use_extraneous_delays = m.use_extraneous_delays ? 1 : 0;
    config->n_cases = 1;
    config->start_time = procsim::epoch_seconds(m.training_end);
    config->evaluation_mode = 0;
    config->seed = 0;
    config->horizon_days = procsim::SimulationConfig{}.horizon_days;
  });
}

psim_status psim_simulate(const psim_model* model, const psim_sim_config* config, psim_log** out,
                          char** metadata_json) {
  return guard([&] {
    need(model && config && out, "psim_simulate: null argument");
    procsim::SimulationConfig c;
    c.architecture = to_architecture(config->architecture);
    c.assignment = to_assignment(config->assignment);
    c.use_extraneous_delays = config->use_extraneous_delays != 0;
    c.n_cases = config->n_cases;
    c.start_time = procsim::from_epoch_seconds(config->start_time);
    c.evaluation_mode = config->evaluation_mode != 0;
    c.seed = config->seed;
    c.horizon_days = config->horizon_days;
    auto r = procsim::simulate(model->mas, c);
    auto* log = new psim_log{std::move(r.log)};
    if (metadata_json) {
      try {
        *metadata_json = dup_string(r.meta.to_json());
      } catch (...) {
        delete log;
        throw;
      }
    }
    *out = log;
  });
}

psim_status psim_evaluate(const psim_log* real, const psim_log* sim, int ngram, psim_metrics* out) {
  return guard([&] {
    need(real && sim && out, "psim_evaluate: null argument");
    *out = to_c(procsim::evaluate(real->log, sim->log, ngram));
  });
}

psim_status psim_metrics_write_csv(const char* path, const char* real_name, const char* sim_name,
                                   const psim_metrics* metrics) {
  return guard([&] {
    need(path && real_name && sim_name && metrics, "psim_metrics_write_csv: null argument");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw procsim::Error(procsim::ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    procsim::write_metrics_csv_header(out);
    procsim::write_metrics_csv_row(out, real_name, sim_name, from_c(*metrics));
    if (!out) throw procsim::Error(procsim::ErrorCode::Io, std::string("failed writing '") + path + "'");
  });
}

psim_status psim_metrics_format(const char* real_name, const char* sim_name, const psim_metrics* metrics,
                                char** text) {
  return guard([&] {
    need(real_name && sim_name && metrics && text, "psim_metrics_format: null argument");
    std::ostringstream out;
    procsim::write_metrics_text(out, real_name, sim_name, from_c(*metrics));
    *text = dup_string(out.str());
  });
}

psim_status psim_interaction_matrix_write(const psim_log* log, const char* path) {
  return guard([&] {
    need(log && path, "psim_interaction_matrix_write: null argument");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw procsim::Error(procsim::ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    procsim::write_interaction_matrix(procsim::interaction_matrix(log->log), out);
  });
}

psim_status psim_auto_select(const psim_log* train, uint64_t seed, const psim_discovery_options* options,
                             psim_selection* out) {
  return guard([&] {
    need(train && out, "psim_auto_select: null argument");
    const auto s = procsim::auto_select_config(train->log, seed, to_options(options));
    out->architecture = s.architecture == procsim::Architecture::Autonomous ? PSIM_AUTONOMOUS : PSIM_ORCHESTRATED;
    out->use_extraneous_delays = s.use_extraneous_delays ? 1 : 0;
    for (std::size_t k = 0; k < 4; ++k) out->ctd[k] = s.scores[k].ctd;
  });
}

void psim_pipeline_config_init(psim_pipeline_config* config) {
  if (!config) return;
  const procsim::PipelineConfig d;
  std::memset(config, 0, sizeof *config);
  config->train_fraction = d.train_fraction;
  config->num_runs = d.num_runs;
  config->seed = d.seed;
  config->architecture = -1;
  config->use_extraneous_delays = -1;
  config->assignment = PSIM_ITERATIVE;
  config->ngram = d.ngram;
  config->threads = d.threads;
  psim_discovery_options_init(&config->discovery);
}

psim_status psim_pipeline_run(const psim_pipeline_config* config, psim_metrics* mean, char** summary) {
  return guard([&] {
    need(config && config->log_path && config->output_dir, "psim_pipeline_run: null argument");
    procsim::PipelineConfig c;
    c.log_path = config->log_path;
    c.columns = to_columns(&config->columns);
    c.train_fraction = config->train_fraction;
    c.num_runs = config->num_runs;
    c.seed = config->seed;
    if (config->architecture >= 0) c.architecture = to_architecture(config->architecture);
    if (config->use_extraneous_delays >= 0) c.use_extraneous_delays = config->use_extraneous_delays != 0;
    c.assignment = to_assignment(config->assignment);
    c.discovery = to_options(&config->discovery);
    c.ngram = config->ngram;
    c.threads = config->threads;
    c.output_dir = config->output_dir;
    const auto r = procsim::run_pipeline(c);
    if (mean) *mean = to_c(r.mean);
    if (summary) {
      std::ifstream in(c.output_dir / "report.txt", std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      *summary = dup_string(buf.str());
    }
  });
}

}  // extern "C"
