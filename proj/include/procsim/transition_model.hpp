#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace procsim {

// Placeholder activity id marking the end of a case.
inline constexpr int kEndActivity = -1;

// Frequencies of the activity following some context, sorted by activity id
// (END first). Probabilities are count / total.
struct NextCounts {
  std::vector<std::pair<int, std::uint64_t>> counts;
  std::uint64_t total = 0;

  void add(int activity, std::uint64_t n = 1);
  std::uint64_t count(int activity) const;
  double probability(int activity) const;
  bool empty() const { return total == 0; }

  bool operator==(const NextCounts&) const = default;
};

// Trie over activity windows read backwards: the path root -> a_k -> a_{k-1}
// -> ... -> a_j spells the window <a_j, ..., a_k>. Each node holds the
// successor counts of every occurrence of its window (`window`) and of the
// occurrences that start a trace (`anchored`), so the longest observed suffix
// of a prefix is found with a single descent.
class SuffixTrie {
 public:
  struct Node {
    int activity = kEndActivity;  // unused at the root
    NextCounts anchored;
    NextCounts window;
    std::vector<std::pair<int, std::uint32_t>> children;  // sorted by activity
  };

  SuffixTrie() : nodes_(1) {}

  const Node& root() const { return nodes_.front(); }
  const Node& node(std::uint32_t index) const { return nodes_[index]; }
  std::size_t size() const { return nodes_.size(); }
  const Node* child(const Node& parent, int activity) const;

  std::uint32_t child_or_insert(std::uint32_t parent, int activity);
  Node& mutable_node(std::uint32_t index) { return nodes_[index]; }

  // Structural equality; node numbering is irrelevant.
  bool operator==(const SuffixTrie& other) const;

 private:
  bool same_subtree(std::uint32_t mine, const SuffixTrie& other, std::uint32_t theirs) const;

  std::vector<Node> nodes_;
};

enum class BehaviorScope { Global, Local };

// One case as seen by the transition model: activity ids plus the id of the
// agent (or agent type) that performed each event.
struct SequenceView {
  std::span<const int> activities;
  std::span<const int> performers;
};

class TransitionModel {
 public:
  TransitionModel() = default;

  // `performer_keys` maps each performer id to the key the local tables are
  // partitioned by (identity for per-agent behavior, agent type otherwise).
  // max_prefix_len == 0 means unbounded.
  static TransitionModel build(BehaviorScope scope, std::span<const SequenceView> cases,
                               std::vector<int> performer_keys, std::size_t num_keys,
                               std::size_t max_prefix_len);

  BehaviorScope scope() const { return scope_; }
  std::size_t max_prefix_len() const { return max_prefix_len_; }
  const std::vector<int>& performer_keys() const { return performer_keys_; }
  const std::vector<SuffixTrie>& tables() const { return tables_; }

  // Counts over the first activity of a case; always global.
  const NextCounts& first_activity() const { return first_; }

  // Exact (no backoff) counts of a full prefix starting a case. In local
  // scope `agent` is the performer of the prefix's last event.
  const NextCounts* prefix_counts(std::span<const int> prefix, std::optional<int> agent) const;
  // Exact counts of a window occurring anywhere in a case.
  const NextCounts* window_counts(std::span<const int> window, std::optional<int> agent) const;

  struct Lookup {
    const NextCounts* counts = nullptr;
    std::size_t context_length = 0;
    bool anchored = false;
  };
  // Counts for the full prefix if it was observed at case start; otherwise
  // the longest proper suffix observed anywhere. counts == nullptr when not
  // even the last activity alone was observed.
  Lookup lookup(std::span<const int> prefix, std::optional<int> agent) const;

  // Deserialization.
  static TransitionModel from_parts(BehaviorScope scope, std::size_t max_prefix_len, NextCounts first,
                                    std::vector<int> performer_keys, std::vector<SuffixTrie> tables);

  bool operator==(const TransitionModel&) const = default;

 private:
  const SuffixTrie* table_for(std::optional<int> agent) const;

  BehaviorScope scope_ = BehaviorScope::Global;
  std::size_t max_prefix_len_ = 0;
  NextCounts first_;
  std::vector<int> performer_keys_;
  std::vector<SuffixTrie> tables_;
};

// Entry [from][to] counts consecutive same-case event pairs; P(to | from) is
// renormalized over the observed outgoing pairs of `from`.
class HandoverMatrix {
 public:
  explicit HandoverMatrix(std::size_t n = 0) : n_(n), counts_(n * n, 0), row_totals_(n, 0) {}

  std::size_t size() const { return n_; }
  void add(std::size_t from, std::size_t to, std::uint64_t n = 1);
  std::uint64_t count(std::size_t from, std::size_t to) const { return counts_[from * n_ + to]; }
  std::uint64_t row_total(std::size_t from) const { return row_totals_[from]; }
  double probability(std::size_t from, std::size_t to) const;

  bool operator==(const HandoverMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> row_totals_;
};

}  // namespace procsim
