#include "procsim/event_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "procsim/error.hpp"

namespace procsim {

bool event_order_less(const Event& a, const Event& b) {
  return std::tie(a.start, a.end, a.activity, a.resource) <
         std::tie(b.start, b.end, b.activity, b.resource);
}

Timestamp Trace::first_start() const {
  Timestamp t = Timestamp::max();
  for (const auto& e : events) t = std::min(t, e.start);
  return t;
}

Timestamp Trace::last_end() const {
  Timestamp t = Timestamp::min();
  for (const auto& e : events) t = std::max(t, e.end);
  return t;
}

EventLog::EventLog(std::vector<Trace> traces) {
  std::map<std::string, std::vector<Event>> by_case;
  for (auto& trace : traces) {
    auto& dst = by_case[trace.case_id];
    for (auto& e : trace.events) {
      if (e.activity.empty()) {
        throw Error(ErrorCode::InvalidArgument, "event in case '" + trace.case_id + "' has an empty activity");
      }
      if (e.end < e.start) {
        throw Error(ErrorCode::InvalidArgument, "event '" + e.activity + "' in case '" + trace.case_id +
                                                    "' ends before it starts");
      }
      dst.push_back(std::move(e));
    }
  }
  traces_.reserve(by_case.size());
  for (auto& [case_id, events] : by_case) {
    if (events.empty()) continue;
    std::sort(events.begin(), events.end(), event_order_less);
    for (const auto& e : events) {
      activities_.insert(e.activity);
      if (e.resource) resources_.insert(*e.resource);
    }
    num_events_ += events.size();
    traces_.push_back(Trace{case_id, std::move(events)});
  }
}

namespace {

// Splits one CSV record. Returns false at end of input. Handles quoted
// fields with embedded separators, quotes and newlines.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line_no;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(std::move(field));
  ++line_no;
  return true;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorCode::Parse, "missing column '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

EventLog parse_log(std::istream& source, const ColumnMap& columns) {
  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!read_record(source, header, line_no)) {
    throw Error(ErrorCode::Parse, "empty input: no header row");
  }
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  const std::size_t case_col = find_column(header, columns.case_id);
  const std::size_t act_col = find_column(header, columns.activity);
  const std::size_t start_col = find_column(header, columns.start);
  const std::size_t end_col = find_column(header, columns.end);
  const std::optional<std::size_t> res_col =
      columns.resource.empty() ? std::nullopt : std::optional{find_column(header, columns.resource)};

  std::map<std::string, Trace> traces;
  std::vector<std::string> fields;
  while (true) {
    const std::size_t row = line_no + 1;
    if (!read_record(source, fields, line_no)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    const std::string where = "row " + std::to_string(row);
    if (fields.size() < header.size()) {
      throw Error(ErrorCode::Parse, where + ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
    }
    const auto start = parse_timestamp(fields[start_col]);
    if (!start) throw Error(ErrorCode::Parse, where + ": unparseable start timestamp '" + fields[start_col] + "'");
    const auto end = parse_timestamp(fields[end_col]);
    if (!end) throw Error(ErrorCode::Parse, where + ": unparseable end timestamp '" + fields[end_col] + "'");
    if (*end < *start) throw Error(ErrorCode::Parse, where + ": end timestamp precedes start timestamp");
    if (fields[act_col].empty()) throw Error(ErrorCode::Parse, where + ": empty activity");

    Event e{fields[act_col], *start, *end, std::nullopt};
    if (res_col && !fields[*res_col].empty()) e.resource = fields[*res_col];
    auto& trace = traces[fields[case_col]];
    trace.case_id = fields[case_col];
    trace.events.push_back(std::move(e));
  }

  std::vector<Trace> out;
  out.reserve(traces.size());
  for (auto& [_, t] : traces) out.push_back(std::move(t));
  return EventLog(std::move(out));
}

EventLog read_log(const std::filesystem::path& path, const ColumnMap& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open log '" + path.string() + "'");
  return parse_log(in, columns);
}

void write_log(const EventLog& log, std::ostream& sink) {
  sink << "case_id,activity,start_time,end_time,resource\n";
  for (const auto& trace : log.traces()) {
    const std::string case_field = csv_escape(trace.case_id);
    for (const auto& e : trace.events) {
      sink << case_field << ',' << csv_escape(e.activity) << ',' << format_timestamp(e.start) << ','
           << format_timestamp(e.end) << ',' << (e.resource ? csv_escape(*e.resource) : std::string{})
           << '\n';
    }
  }
  if (!sink) throw Error(ErrorCode::Io, "failed writing event log");
}

void save_log(const EventLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  write_log(log, out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

std::vector<const Trace*> cases_by_start(const EventLog& log) {
  std::vector<std::pair<Timestamp, const Trace*>> keyed;
  keyed.reserve(log.num_cases());
  for (const auto& t : log.traces()) keyed.emplace_back(t.first_start(), &t);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first, a.second->case_id) < std::tie(b.first, b.second->case_id);
  });
  std::vector<const Trace*> out;
  out.reserve(keyed.size());
  for (const auto& [_, t] : keyed) out.push_back(t);
  return out;
}

SplitResult temporal_split(const EventLog& log, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  if (log.num_cases() < 2) {
    throw Error(ErrorCode::InvalidArgument, "temporal split needs at least 2 cases, log has " +
                                                std::to_string(log.num_cases()));
  }
  const auto ordered = cases_by_start(log);
  auto index = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(ordered.size())));
  index = std::clamp<std::size_t>(index, 1, ordered.size() - 1);
  const Timestamp separation = ordered[index]->first_start();

  std::vector<Trace> train;
  std::vector<Trace> test;
  SplitResult result;
  for (const Trace* t : ordered) {
    if (t->last_end() < separation) {
      train.push_back(*t);
    } else if (t->first_start() >= separation) {
      test.push_back(*t);
    } else {
      result.dropped.push_back(t->case_id);
    }
  }
  result.train = EventLog(std::move(train));
  result.test = EventLog(std::move(test));
  result.separation = separation;
  return result;
}

std::string dummy_label(std::string_view activity) { return "dummy:" + std::string(activity); }

std::string resource_label(const Event& e) { return e.resource ? *e.resource : dummy_label(e.activity); }

}  // namespace procsim
