#pragma once

#include <cstdint>
#include <random>

namespace evt {

/// Seeded uniform stream. Substreams are derived from (master seed, index)
/// through std::seed_seq, so replicate j sees the same numbers no matter
/// which thread runs it.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : RandomStream(seed, 0) {}

  RandomStream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
    engine_.seed(seq);
  }

  /// Uniform on (0, 1]. Never returns 0, so -log(u) and u^(-1/a) stay finite.
  double open_unit() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  /// Uniform on (0, 1), midpoints of the 2^53 grid.
  double interior_unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

}  // namespace evt
