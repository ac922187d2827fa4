#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "procsim/event_log.hpp"

namespace procsim {

// Distances between a reference log and a simulated one. ngd is in [0, 1],
// the others are in hours.
struct MetricsReport {
  double ngd = 0.0;
  double aed = 0.0;
  double ced = 0.0;
  double red = 0.0;
  double ctd = 0.0;
};

enum class EventDistribution { Absolute, Circadian, Relative };

double ngd(const EventLog& real, const EventLog& sim, int n = 2);
double event_distribution_distance(const EventLog& real, const EventLog& sim, EventDistribution kind);
double ctd(const EventLog& real, const EventLog& sim);
MetricsReport evaluate(const EventLog& real, const EventLog& sim, int ngram = 2);

void write_metrics_csv_header(std::ostream& out);
void write_metrics_csv_row(std::ostream& out, const std::string& real_name, const std::string& sim_name,
                           const MetricsReport& m);
void write_metrics_text(std::ostream& out, const std::string& real_name, const std::string& sim_name,
                        const MetricsReport& m);

// Handover counts between consecutive events of a case, by resource label
// (missing resources use the activity's dummy label).
struct InteractionMatrix {
  std::vector<std::string> labels;  // sorted
  std::vector<std::vector<std::uint64_t>> counts;  // [from][to]

  std::uint64_t total() const;
};

InteractionMatrix interaction_matrix(const EventLog& log);
void write_interaction_matrix(const InteractionMatrix& m, std::ostream& out);

}  // namespace procsim
