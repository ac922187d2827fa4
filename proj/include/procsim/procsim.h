/* C interface of the procsim library. All handles are opaque; functions
 * returning psim_status leave a message retrievable with psim_last_error()
 * (per thread) on failure. Strings returned through char** are owned by the
 * caller and released with psim_string_free(). Timestamps are seconds since
 * the Unix epoch, UTC. */
#ifndef PROCSIM_H
#define PROCSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PROCSIM_BUILDING_LIBRARY)
#    define PSIM_API __declspec(dllexport)
#  else
#    define PSIM_API __declspec(dllimport)
#  endif
#else
#  define PSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psim_status {
  PSIM_OK = 0,
  PSIM_ERR_INVALID_ARGUMENT = 1,
  PSIM_ERR_PARSE = 2,
  PSIM_ERR_IO = 3,
  PSIM_ERR_MODEL = 4,
  PSIM_ERR_INTERNAL = 5
} psim_status;

typedef enum psim_architecture { PSIM_ORCHESTRATED = 0, PSIM_AUTONOMOUS = 1 } psim_architecture;
typedef enum psim_assignment { PSIM_ITERATIVE = 0, PSIM_DIRECT = 1 } psim_assignment;

typedef struct psim_log psim_log;
typedef struct psim_model psim_model;

/* Column names; NULL selects the default (case_id, activity, start_time,
 * end_time, resource). An empty resource name means no resource column. */
typedef struct psim_columns {
  const char* case_id;
  const char* activity;
  const char* start;
  const char* end;
  const char* resource;
} psim_columns;

typedef struct psim_discovery_options {
  int granularity_minutes;
  double schedule_support;
  double type_threshold;
  double delay_min_fraction;
  int type_level_behavior;
  size_t max_prefix_len; /* 0 = unbounded */
} psim_discovery_options;

typedef struct psim_sim_config {
  int architecture; /* psim_architecture */
  int assignment;   /* psim_assignment */
  int use_extraneous_delays;
  size_t n_cases;
  int64_t start_time;
  int evaluation_mode;
  uint64_t seed;
  int horizon_days;
} psim_sim_config;

typedef struct psim_metrics {
  double ngd;
  double aed;
  double ced;
  double red;
  double ctd;
} psim_metrics;

typedef struct psim_selection {
  int architecture;
  int use_extraneous_delays;
  /* orchestrated, orchestrated+delays, autonomous, autonomous+delays */
  double ctd[4];
} psim_selection;

typedef struct psim_pipeline_config {
  const char* log_path;
  psim_columns columns;
  double train_fraction;
  int num_runs;
  uint64_t seed;
  int architecture;          /* -1: auto-select */
  int use_extraneous_delays; /* -1: auto-select */
  int assignment;
  int ngram;
  int threads; /* 0: hardware concurrency */
  const char* output_dir;
  psim_discovery_options discovery;
} psim_pipeline_config;

PSIM_API const char* psim_version(void);
PSIM_API const char* psim_last_error(void);
PSIM_API void psim_string_free(char* s);
/* ISO-8601 date/time, optional offset; naive times are UTC. */
PSIM_API psim_status psim_parse_timestamp(const char* text, int64_t* out);

/* Event logs */
PSIM_API psim_status psim_log_load(const char* path, const psim_columns* columns, psim_log** out);
PSIM_API psim_status psim_log_parse(const char* csv, size_t length, const psim_columns* columns, psim_log** out);
PSIM_API psim_status psim_log_save(const psim_log* log, const char* path);
PSIM_API void psim_log_free(psim_log* log);
PSIM_API size_t psim_log_num_cases(const psim_log* log);
PSIM_API size_t psim_log_num_events(const psim_log* log);
PSIM_API psim_status psim_log_first_start(const psim_log* log, int64_t* out);
PSIM_API psim_status psim_log_split(const psim_log* log, double train_fraction, psim_log** train, psim_log** test);

/* Models */
PSIM_API void psim_discovery_options_init(psim_discovery_options* options);
/* warnings_json (optional) receives a JSON array of strings. */
PSIM_API psim_status psim_model_discover(const psim_log* log, const psim_discovery_options* options,
                                         psim_model** out, char** warnings_json);
PSIM_API psim_status psim_model_load(const char* path, psim_model** out);
PSIM_API psim_status psim_model_save(const psim_model* model, const char* path);
PSIM_API void psim_model_free(psim_model* model);
PSIM_API size_t psim_model_num_agents(const psim_model* model);

/* Simulation. psim_sim_config_init copies the model's default configuration
 * and sets start_time to the end of the discovery log. */
PSIM_API psim_status psim_sim_config_init(psim_sim_config* config, const psim_model* model);
PSIM_API psim_status psim_simulate(const psim_model* model, const psim_sim_config* config, psim_log** out,
                                   char** metadata_json);

/* Evaluation */
PSIM_API psim_status psim_evaluate(const psim_log* real, const psim_log* sim, int ngram, psim_metrics* out);
PSIM_API psim_status psim_metrics_write_csv(const char* path, const char* real_name, const char* sim_name,
                                            const psim_metrics* metrics);
PSIM_API psim_status psim_metrics_format(const char* real_name, const char* sim_name, const psim_metrics* metrics,
                                         char** text);
PSIM_API psim_status psim_interaction_matrix_write(const psim_log* log, const char* path);

/* Pipeline */
PSIM_API psim_status psim_auto_select(const psim_log* train, uint64_t seed, const psim_discovery_options* options,
                                      psim_selection* out);
PSIM_API void psim_pipeline_config_init(psim_pipeline_config* config);
/* summary (optional) receives the text report. */
PSIM_API psim_status psim_pipeline_run(const psim_pipeline_config* config, psim_metrics* mean, char** summary);

#ifdef __cplusplus
}
#endif

#endif
