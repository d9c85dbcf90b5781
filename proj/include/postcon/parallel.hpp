#pragma once

#include <cstdint>
#include <functional>

namespace postcon {

/// Number of worker threads for a requested count (0 = hardware concurrency).
int resolve_threads(int requested);

/// Runs body(i) for i in [0, count). body must only write to state owned by
/// index i; under that contract the result is identical for every thread
/// count, so reductions over per-index slots stay byte-deterministic.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& body);

}  // namespace postcon
