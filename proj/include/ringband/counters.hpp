#pragma once

#include <cstdint>

namespace ringband {

// Structured operation tallies used by the benchmark harness and by tests
// that pin complexity guarantees. Thread-local so concurrent test shards
// cannot bleed into each other's measurements.
struct Counters {
  std::uint64_t f64_ops = 0;     // double-precision field operations
  std::uint64_t block_muls = 0;  // dense matrix-matrix multiplications
  std::uint64_t entry_ops = 0;   // per-entry recurrence multiply/divide steps
};

inline Counters& counters() {
  thread_local Counters c;
  return c;
}

inline Counters counters_snapshot() { return counters(); }

inline Counters counters_delta(const Counters& before) {
  const Counters& now = counters();
  return Counters{now.f64_ops - before.f64_ops,
                  now.block_muls - before.block_muls,
                  now.entry_ops - before.entry_ops};
}

}  // namespace ringband
