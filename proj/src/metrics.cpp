#include "procsim/metrics.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <ostream>

#include "procsim/distributions.hpp"
#include "procsim/error.hpp"

namespace procsim {
namespace {

void require_non_empty(const EventLog& real, const EventLog& sim) {
  if (real.num_events() == 0 || sim.num_events() == 0) {
    throw Error(ErrorCode::InvalidArgument, "metrics need two non-empty logs");
  }
}

using Gram = std::vector<std::string>;

std::map<Gram, std::int64_t> ngram_counts(const EventLog& log, int n, std::int64_t& total) {
  // Markers cannot collide with activity labels read from CSV cells: both
  // contain a newline.
  static const std::string kStart = "\n<start>";
  static const std::string kEnd = "\n<end>";
  std::map<Gram, std::int64_t> counts;
  total = 0;
  for (const auto& t : log.traces()) {
    std::vector<std::string> seq(static_cast<std::size_t>(n - 1), kStart);
    for (const auto& e : t.events) seq.push_back(e.activity);
    seq.push_back(kEnd);
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= seq.size(); ++i) {
      ++counts[Gram(seq.begin() + static_cast<std::ptrdiff_t>(i), seq.begin() + static_cast<std::ptrdiff_t>(i) + n)];
      ++total;
    }
  }
  return counts;
}

double hours_between(Timestamp from, Timestamp to) { return to_hours(epoch_seconds(to) - epoch_seconds(from)); }

Timestamp earliest_instant(const EventLog& log) {
  Timestamp t = Timestamp::max();
  for (const auto& tr : log.traces()) {
    for (const auto& e : tr.events) t = std::min({t, e.start, e.end});
  }
  return t;
}

std::vector<double> absolute_hours(const EventLog& log, Timestamp origin) {
  std::vector<double> v;
  v.reserve(log.num_events() * 2);
  for (const auto& tr : log.traces()) {
    for (const auto& e : tr.events) {
      v.push_back(hours_between(origin, e.start));
      v.push_back(hours_between(origin, e.end));
    }
  }
  return v;
}

std::vector<double> relative_hours(const EventLog& log) {
  std::vector<double> v;
  v.reserve(log.num_events() * 2);
  for (const auto& tr : log.traces()) {
    if (tr.events.empty()) continue;
    const Timestamp origin = tr.first_start();
    for (const auto& e : tr.events) {
      v.push_back(hours_between(origin, e.start));
      v.push_back(hours_between(origin, e.end));
    }
  }
  return v;
}

std::array<std::vector<double>, 7> circadian_hours(const EventLog& log) {
  std::array<std::vector<double>, 7> days;
  for (const auto& tr : log.traces()) {
    for (const auto& e : tr.events) {
      for (const Timestamp t : {e.start, e.end}) {
        days[static_cast<std::size_t>(weekday_index(t))].push_back(to_hours(seconds_of_day(t)));
      }
    }
  }
  return days;
}

std::vector<double> cycle_hours(const EventLog& log) {
  std::vector<double> v;
  for (const auto& tr : log.traces()) {
    if (!tr.events.empty()) v.push_back(hours_between(tr.first_start(), tr.last_end()));
  }
  return v;
}

constexpr double kMissingWeekdayPenalty = 24.0;

}  // namespace

double ngd(const EventLog& real, const EventLog& sim, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "n-gram size must be at least 2");
  require_non_empty(real, sim);
  std::int64_t total_real = 0;
  std::int64_t total_sim = 0;
  const auto a = ngram_counts(real, n, total_real);
  const auto b = ngram_counts(sim, n, total_sim);
  std::int64_t diff = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      diff += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      diff += ib->second;
      ++ib;
    } else {
      diff += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(diff) / static_cast<double>(total_real + total_sim);
}

double event_distribution_distance(const EventLog& real, const EventLog& sim, EventDistribution kind) {
  require_non_empty(real, sim);
  switch (kind) {
    case EventDistribution::Absolute: {
      const Timestamp origin = std::min(earliest_instant(real), earliest_instant(sim));
      return wasserstein_1d(absolute_hours(real, origin), absolute_hours(sim, origin));
    }
    case EventDistribution::Relative:
      return wasserstein_1d(relative_hours(real), relative_hours(sim));
    case EventDistribution::Circadian: {
      const auto a = circadian_hours(real);
      const auto b = circadian_hours(sim);
      double sum = 0.0;
      int days = 0;
      for (std::size_t d = 0; d < 7; ++d) {
        if (a[d].empty() && b[d].empty()) continue;
        sum += (a[d].empty() || b[d].empty()) ? kMissingWeekdayPenalty : wasserstein_1d(a[d], b[d]);
        ++days;
      }
      return sum / days;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown event distribution kind");
}

double ctd(const EventLog& real, const EventLog& sim) {
  require_non_empty(real, sim);
  return wasserstein_1d(cycle_hours(real), cycle_hours(sim));
}

MetricsReport evaluate(const EventLog& real, const EventLog& sim, int ngram) {
  MetricsReport m;
  m.ngd = ngd(real, sim, ngram);
  m.aed = event_distribution_distance(real, sim, EventDistribution::Absolute);
  m.ced = event_distribution_distance(real, sim, EventDistribution::Circadian);
  m.red = event_distribution_distance(real, sim, EventDistribution::Relative);
  m.ctd = ctd(real, sim);
  return m;
}

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_metrics_csv_header(std::ostream& out) { out << "real,sim,ngd,aed,ced,red,ctd\n"; }

void write_metrics_csv_row(std::ostream& out, const std::string& real_name, const std::string& sim_name,
                           const MetricsReport& m) {
  out << csv_cell(real_name) << ',' << csv_cell(sim_name) << ',' << fmt(m.ngd) << ',' << fmt(m.aed) << ','
      << fmt(m.ced) << ',' << fmt(m.red) << ',' << fmt(m.ctd) << '\n';
}

void write_metrics_text(std::ostream& out, const std::string& real_name, const std::string& sim_name,
                        const MetricsReport& m) {
  out << "reference: " << real_name << "\nsimulated: " << sim_name << '\n'
      << "  NGD  " << fmt(m.ngd) << '\n'
      << "  AED  " << fmt(m.aed) << " h\n"
      << "  CED  " << fmt(m.ced) << " h\n"
      << "  RED  " << fmt(m.red) << " h\n"
      << "  CTD  " << fmt(m.ctd) << " h\n";
}

std::uint64_t InteractionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

InteractionMatrix interaction_matrix(const EventLog& log) {
  std::map<std::string, std::size_t> index;
  for (const auto& tr : log.traces()) {
    for (const auto& e : tr.events) index.emplace(resource_label(e), 0);
  }
  InteractionMatrix m;
  for (auto& [label, idx] : index) {
    idx = m.labels.size();
    m.labels.push_back(label);
  }
  m.counts.assign(m.labels.size(), std::vector<std::uint64_t>(m.labels.size(), 0));
  for (const auto& tr : log.traces()) {
    for (std::size_t i = 1; i < tr.events.size(); ++i) {
      ++m.counts[index.at(resource_label(tr.events[i - 1]))][index.at(resource_label(tr.events[i]))];
    }
  }
  return m;
}

void write_interaction_matrix(const InteractionMatrix& m, std::ostream& out) {
  out << "from\\to";
  for (const auto& l : m.labels) out << ',' << csv_cell(l);
  out << '\n';
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    out << csv_cell(m.labels[i]);
    for (auto c : m.counts[i]) out << ',' << c;
    out << '\n';
  }
}

}  // namespace procsim
