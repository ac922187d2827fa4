#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace procsim {

// Seeded generator with a platform-independent draw sequence. Only the raw
// mt19937_64 output is used; all transforms live in this project so runs are
// reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  // Index drawn proportionally to non-negative weights. Requires a positive sum.
  template <typename Weight>
  std::size_t categorical(std::span<const Weight> weights) {
    double total = 0.0;
    for (const auto w : weights) total += static_cast<double>(w);
    const double target = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= Weight{}) continue;
      acc += static_cast<double>(weights[i]);
      last_positive = i;
      if (target < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace procsim
