#include "procsim/transition_model.hpp"

#include <algorithm>

#include "procsim/error.hpp"

namespace procsim {

void NextCounts::add(int activity, std::uint64_t n) {
  auto it = std::lower_bound(counts.begin(), counts.end(), activity,
                             [](const auto& entry, int a) { return entry.first < a; });
  if (it != counts.end() && it->first == activity) {
    it->second += n;
  } else {
    counts.insert(it, {activity, n});
  }
  total += n;
}

std::uint64_t NextCounts::count(int activity) const {
  auto it = std::lower_bound(counts.begin(), counts.end(), activity,
                             [](const auto& entry, int a) { return entry.first < a; });
  return (it != counts.end() && it->first == activity) ? it->second : 0;
}

double NextCounts::probability(int activity) const {
  return total == 0 ? 0.0 : static_cast<double>(count(activity)) / static_cast<double>(total);
}

const SuffixTrie::Node* SuffixTrie::child(const Node& parent, int activity) const {
  auto it = std::lower_bound(parent.children.begin(), parent.children.end(), activity,
                             [](const auto& entry, int a) { return entry.first < a; });
  if (it == parent.children.end() || it->first != activity) return nullptr;
  return &nodes_[it->second];
}

std::uint32_t SuffixTrie::child_or_insert(std::uint32_t parent, int activity) {
  auto& kids = nodes_[parent].children;
  auto it = std::lower_bound(kids.begin(), kids.end(), activity,
                             [](const auto& entry, int a) { return entry.first < a; });
  if (it != kids.end() && it->first == activity) return it->second;
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  kids.insert(it, {activity, index});
  Node n;
  n.activity = activity;
  nodes_.push_back(std::move(n));
  return index;
}

bool SuffixTrie::operator==(const SuffixTrie& other) const { return same_subtree(0, other, 0); }

bool SuffixTrie::same_subtree(std::uint32_t mine, const SuffixTrie& other, std::uint32_t theirs) const {
  const Node& a = nodes_[mine];
  const Node& b = other.nodes_[theirs];
  if (a.activity != b.activity || a.anchored != b.anchored || a.window != b.window ||
      a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.children.size(); ++k) {
    if (a.children[k].first != b.children[k].first) return false;
    if (!same_subtree(a.children[k].second, other, b.children[k].second)) return false;
  }
  return true;
}

TransitionModel TransitionModel::build(BehaviorScope scope, std::span<const SequenceView> cases,
                                       std::vector<int> performer_keys, std::size_t num_keys,
                                       std::size_t max_prefix_len) {
  TransitionModel model;
  model.scope_ = scope;
  model.max_prefix_len_ = max_prefix_len;
  if (scope == BehaviorScope::Global) {
    model.tables_.resize(1);
  } else {
    model.performer_keys_ = std::move(performer_keys);
    model.tables_.resize(num_keys);
  }

  for (const auto& c : cases) {
    const auto acts = c.activities;
    const std::size_t k = acts.size();
    for (std::size_t i = 0; i <= k; ++i) {
      const int next = i < k ? acts[i] : kEndActivity;
      if (i == 0) {
        model.first_.add(next);
        continue;
      }
      SuffixTrie* table = &model.tables_.front();
      if (scope == BehaviorScope::Local) {
        const int key = model.performer_keys_.at(static_cast<std::size_t>(c.performers[i - 1]));
        table = &model.tables_.at(static_cast<std::size_t>(key));
      }
      const std::size_t lowest = (max_prefix_len == 0 || i <= max_prefix_len) ? 0 : i - max_prefix_len;
      std::uint32_t node = 0;
      for (std::size_t l = i; l-- > lowest;) {
        node = table->child_or_insert(node, acts[l]);
        auto& n = table->mutable_node(node);
        n.window.add(next);
        if (l == 0) n.anchored.add(next);
      }
    }
  }
  return model;
}

TransitionModel TransitionModel::from_parts(BehaviorScope scope, std::size_t max_prefix_len, NextCounts first,
                                            std::vector<int> performer_keys, std::vector<SuffixTrie> tables) {
  TransitionModel model;
  model.scope_ = scope;
  model.max_prefix_len_ = max_prefix_len;
  model.first_ = std::move(first);
  model.performer_keys_ = std::move(performer_keys);
  model.tables_ = std::move(tables);
  if (model.tables_.empty()) throw Error(ErrorCode::Model, "transition model without tables");
  return model;
}

const SuffixTrie* TransitionModel::table_for(std::optional<int> agent) const {
  if (scope_ == BehaviorScope::Global) return &tables_.front();
  if (!agent || *agent < 0 || static_cast<std::size_t>(*agent) >= performer_keys_.size()) {
    throw Error(ErrorCode::Model, "local transition lookup requires a known agent");
  }
  const int key = performer_keys_[static_cast<std::size_t>(*agent)];
  if (key < 0 || static_cast<std::size_t>(key) >= tables_.size()) {
    throw Error(ErrorCode::Model, "agent behavior key out of range");
  }
  return &tables_[static_cast<std::size_t>(key)];
}

const NextCounts* TransitionModel::prefix_counts(std::span<const int> prefix, std::optional<int> agent) const {
  if (prefix.empty()) return &first_;
  const SuffixTrie* table = table_for(agent);
  const SuffixTrie::Node* node = &table->root();
  for (std::size_t l = prefix.size(); l-- > 0;) {
    node = table->child(*node, prefix[l]);
    if (!node) return nullptr;
  }
  return node->anchored.empty() ? nullptr : &node->anchored;
}

const NextCounts* TransitionModel::window_counts(std::span<const int> window, std::optional<int> agent) const {
  if (window.empty()) return nullptr;
  const SuffixTrie* table = table_for(agent);
  const SuffixTrie::Node* node = &table->root();
  for (std::size_t l = window.size(); l-- > 0;) {
    node = table->child(*node, window[l]);
    if (!node) return nullptr;
  }
  return node->window.empty() ? nullptr : &node->window;
}

TransitionModel::Lookup TransitionModel::lookup(std::span<const int> prefix, std::optional<int> agent) const {
  if (prefix.empty()) return {&first_, 0, true};
  const SuffixTrie* table = table_for(agent);

  // Descend along the prefix from its last activity, remembering the node
  // reached at each depth.
  std::vector<const SuffixTrie::Node*> path;
  const SuffixTrie::Node* node = &table->root();
  for (std::size_t l = prefix.size(); l-- > 0;) {
    node = table->child(*node, prefix[l]);
    if (!node) break;
    path.push_back(node);
  }
  if (path.size() == prefix.size() && !path.back()->anchored.empty()) {
    return {&path.back()->anchored, prefix.size(), true};
  }
  // Full prefix unseen at case start: drop leading activities.
  std::size_t depth = std::min(path.size(), prefix.size() - 1);
  while (depth > 0 && path[depth - 1]->window.empty()) --depth;
  if (depth == 0) return {nullptr, 0, false};
  return {&path[depth - 1]->window, depth, false};
}

void HandoverMatrix::add(std::size_t from, std::size_t to, std::uint64_t n) {
  counts_[from * n_ + to] += n;
  row_totals_[from] += n;
}

double HandoverMatrix::probability(std::size_t from, std::size_t to) const {
  const auto total = row_totals_[from];
  return total == 0 ? 0.0 : static_cast<double>(count(from, to)) / static_cast<double>(total);
}

}  // namespace procsim
