#include "procsim/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "procsim/error.hpp"

namespace procsim {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json dist_to_json(const FittedDistribution& d) {
  return {{"family", family_name(d.family)}, {"params", {d.params[0], d.params[1]}}, {"fit_error", d.fit_error}};
}

FittedDistribution dist_from_json(const json& j) {
  FittedDistribution d;
  d.family = family_from_name(j.at("family").get<std::string>());
  const auto& p = j.at("params");
  d.params = {p.at(0).get<double>(), p.at(1).get<double>()};
  d.fit_error = j.at("fit_error").get<double>();
  if (!d.valid()) throw Error(ErrorCode::Model, "invalid distribution record");
  return d;
}

json counts_to_json(const NextCounts& c) {
  json arr = json::array();
  for (const auto& [act, n] : c.counts) arr.push_back({act, n});
  return arr;
}

NextCounts counts_from_json(const json& j) {
  NextCounts c;
  for (const auto& entry : j) c.add(entry.at(0).get<int>(), entry.at(1).get<std::uint64_t>());
  return c;
}

json node_to_json(const SuffixTrie& trie, const SuffixTrie::Node& node) {
  json j;
  j["a"] = node.activity;
  if (!node.anchored.empty()) j["anchored"] = counts_to_json(node.anchored);
  if (!node.window.empty()) j["window"] = counts_to_json(node.window);
  if (!node.children.empty()) {
    json kids = json::array();
    for (const auto& [_, idx] : node.children) kids.push_back(node_to_json(trie, trie.node(idx)));
    j["children"] = std::move(kids);
  }
  return j;
}

void node_from_json(const json& j, SuffixTrie& trie, std::uint32_t index) {
  {
    auto& n = trie.mutable_node(index);
    if (j.contains("anchored")) n.anchored = counts_from_json(j["anchored"]);
    if (j.contains("window")) n.window = counts_from_json(j["window"]);
  }
  if (!j.contains("children")) return;
  for (const auto& kid : j["children"]) {
    const std::uint32_t child = trie.child_or_insert(index, kid.at("a").get<int>());
    node_from_json(kid, trie, child);
  }
}

json transitions_to_json(const TransitionModel& m) {
  json tables = json::array();
  for (const auto& t : m.tables()) tables.push_back(node_to_json(t, t.root()));
  return {{"scope", m.scope() == BehaviorScope::Global ? "global" : "local"},
          {"max_prefix_len", m.max_prefix_len()},
          {"first", counts_to_json(m.first_activity())},
          {"performer_keys", m.performer_keys()},
          {"tables", std::move(tables)}};
}

TransitionModel transitions_from_json(const json& j) {
  const auto scope_name = j.at("scope").get<std::string>();
  if (scope_name != "global" && scope_name != "local") throw Error(ErrorCode::Model, "unknown transition scope");
  std::vector<SuffixTrie> tables;
  for (const auto& t : j.at("tables")) {
    SuffixTrie trie;
    node_from_json(t, trie, 0);
    tables.push_back(std::move(trie));
  }
  return TransitionModel::from_parts(scope_name == "global" ? BehaviorScope::Global : BehaviorScope::Local,
                                     j.at("max_prefix_len").get<std::size_t>(), counts_from_json(j.at("first")),
                                     j.at("performer_keys").get<std::vector<int>>(), std::move(tables));
}

json schedule_to_json(const Schedule& s) {
  json grid = json::array();
  const std::size_t per_day = s.slots_per_day();
  for (std::size_t d = 0; d < 7; ++d) {
    std::string row;
    for (std::size_t k = 0; k < per_day; ++k) row.push_back(s.is_working_slot(d * per_day + k) ? '1' : '0');
    grid.push_back(row);
  }
  return {{"granularity_minutes", s.granularity_minutes()}, {"always_available", s.always_available()},
          {"grid", std::move(grid)}};
}

Schedule schedule_from_json(const json& j) {
  const int gran = j.at("granularity_minutes").get<int>();
  std::vector<bool> slots;
  for (const auto& row : j.at("grid")) {
    for (char c : row.get<std::string>()) slots.push_back(c == '1');
  }
  return Schedule(gran, std::move(slots));
}

}  // namespace

std::string model_to_json(const Mas& mas) {
  json doc;
  doc["format"] = "procsim-model";
  doc["version"] = kFormatVersion;
  const auto& o = mas.options;
  doc["options"] = {{"granularity_minutes", o.granularity_minutes},
                    {"schedule_support", o.schedule_support},
                    {"type_threshold", o.type_threshold},
                    {"delay_min_fraction", o.delay_min_fraction},
                    {"type_level_behavior", o.type_level_behavior},
                    {"max_prefix_len", o.max_prefix_len}};
  doc["defaults"] = {{"architecture", architecture_name(mas.architecture)},
                     {"assignment", assignment_name(mas.assignment)},
                     {"extraneous_delays", mas.use_extraneous_delays}};
  doc["activities"] = mas.activities;
  doc["training_end"] = format_timestamp(mas.training_end);

  json agents = json::array();
  for (const auto& a : mas.agents) {
    json caps = json::array();
    for (const auto& [act, dist] : a.capabilities.durations) {
      caps.push_back({{"activity", mas.activities.at(static_cast<std::size_t>(act))}, {"distribution", dist_to_json(dist)}});
    }
    agents.push_back({{"id", a.id},
                      {"name", a.name},
                      {"type", a.agent_type},
                      {"dummy", a.is_dummy},
                      {"schedule", schedule_to_json(a.schedule)},
                      {"capabilities", std::move(caps)}});
  }
  doc["agents"] = std::move(agents);
  doc["interarrival"] = dist_to_json(mas.interarrival);

  json delays = json::array();
  for (std::size_t act = 0; act < mas.extraneous_delays.size(); ++act) {
    if (mas.extraneous_delays[act]) {
      delays.push_back({{"activity", mas.activities[act]}, {"distribution", dist_to_json(*mas.extraneous_delays[act])}});
    }
  }
  doc["extraneous_delays"] = std::move(delays);
  doc["transitions"] = {{"global", transitions_to_json(mas.global_transitions)},
                        {"local", transitions_to_json(mas.local_transitions)}};

  json rows = json::array();
  for (std::size_t i = 0; i < mas.handovers.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < mas.handovers.size(); ++k) row.push_back(mas.handovers.count(i, k));
    rows.push_back(std::move(row));
  }
  doc["handover"] = {{"counts", std::move(rows)}};
  return doc.dump(1);
}

Mas model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "procsim-model" || doc.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::Model, "unsupported model format or version");
    }
    Mas mas;
    const auto& o = doc.at("options");
    mas.options.granularity_minutes = o.at("granularity_minutes").get<int>();
    mas.options.schedule_support = o.at("schedule_support").get<double>();
    mas.options.type_threshold = o.at("type_threshold").get<double>();
    mas.options.delay_min_fraction = o.at("delay_min_fraction").get<double>();
    mas.options.type_level_behavior = o.at("type_level_behavior").get<bool>();
    mas.options.max_prefix_len = o.at("max_prefix_len").get<std::size_t>();
    const auto& d = doc.at("defaults");
    mas.architecture = architecture_from_name(d.at("architecture").get<std::string>());
    mas.assignment = assignment_from_name(d.at("assignment").get<std::string>());
    mas.use_extraneous_delays = d.at("extraneous_delays").get<bool>();
    mas.activities = doc.at("activities").get<std::vector<std::string>>();
    const auto end = parse_timestamp(doc.at("training_end").get<std::string>());
    if (!end) throw Error(ErrorCode::Model, "invalid training_end timestamp");
    mas.training_end = *end;
    if (!std::is_sorted(mas.activities.begin(), mas.activities.end())) {
      throw Error(ErrorCode::Model, "activity list must be sorted");
    }

    for (const auto& ja : doc.at("agents")) {
      Agent a;
      a.id = ja.at("id").get<int>();
      a.name = ja.at("name").get<std::string>();
      a.agent_type = ja.at("type").get<int>();
      a.is_dummy = ja.at("dummy").get<bool>();
      a.schedule = schedule_from_json(ja.at("schedule"));
      for (const auto& jc : ja.at("capabilities")) {
        const int act = mas.activity_id(jc.at("activity").get<std::string>());
        if (act < 0) throw Error(ErrorCode::Model, "capability references an unknown activity");
        a.capabilities.durations.emplace(act, dist_from_json(jc.at("distribution")));
      }
      mas.agents.push_back(std::move(a));
    }
    mas.interarrival = dist_from_json(doc.at("interarrival"));
    mas.extraneous_delays.assign(mas.activities.size(), std::nullopt);
    for (const auto& jd : doc.at("extraneous_delays")) {
      const int act = mas.activity_id(jd.at("activity").get<std::string>());
      if (act < 0) throw Error(ErrorCode::Model, "delay references an unknown activity");
      mas.extraneous_delays[static_cast<std::size_t>(act)] = dist_from_json(jd.at("distribution"));
    }
    mas.global_transitions = transitions_from_json(doc.at("transitions").at("global"));
    mas.local_transitions = transitions_from_json(doc.at("transitions").at("local"));

    const auto& rows = doc.at("handover").at("counts");
    mas.handovers = HandoverMatrix(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw Error(ErrorCode::Model, "handover matrix is not square");
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto n = rows[i][k].get<std::uint64_t>();
        if (n) mas.handovers.add(i, k, n);
      }
    }
    mas.validate();
    return mas;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Model, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const Mas& mas, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << model_to_json(mas) << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

Mas load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open model '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace procsim
