#pragma once

// Reference computations used to cross-check the library. They share no code
// with it beyond the plain data types.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "procsim/event_log.hpp"

namespace oracles {

// 1-Wasserstein distance by solving the transport problem as a min-cost flow
// over integer masses: every point of `a` supplies |b| units, every point of
// `b` demands |a| units. Quadratic in the sample sizes.
double transport_w1(const std::vector<double>& a, const std::vector<double>& b);

// A count as an exact fraction.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  bool operator==(const Ratio& o) const { return num * o.den == o.num * den && (den == 0) == (o.den == 0); }
};

using Sequence = std::vector<std::string>;
inline const std::string kEnd = "<END>";

// P(next | full prefix) by enumerating every trace that starts with `prefix`.
// With `performer`, only traces whose prefix ends with an event by that
// resource label count.
std::map<std::string, Ratio> prefix_distribution(const procsim::EventLog& log, const Sequence& prefix,
                                                 const std::optional<std::string>& performer = std::nullopt);

// P(next | window) over every position where `window` occurs in a trace.
std::map<std::string, Ratio> window_distribution(const procsim::EventLog& log, const Sequence& window,
                                                 const std::optional<std::string>& performer = std::nullopt);

// The backoff rule spelled out naively: the full prefix if any trace starts
// with it, otherwise the longest proper suffix occurring anywhere.
std::map<std::string, Ratio> backoff_distribution(const procsim::EventLog& log, const Sequence& prefix,
                                                  const std::optional<std::string>& performer = std::nullopt);

// P(to | from) over consecutive same-case event pairs, by resource label.
Ratio handover(const procsim::EventLog& log, const std::string& from, const std::string& to);

}  // namespace oracles
