#pragma once

#include <cstddef>
#include <functional>

namespace pirsim {

// Worker count: PIR_SIM_THREADS when set (0 means auto), else the hardware
// concurrency, at least 1.
std::size_t thread_budget();

// Runs fn(begin, end) over [0, total) split into fixed-size chunks handed to
// a worker pool. Chunk boundaries depend only on (total, chunk), never on the
// worker count, so callers that write results indexed by position get
// identical output for any thread budget. fn must not touch shared state.
// Rethrows the first worker exception.
void parallel_chunks(std::size_t total, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace pirsim
