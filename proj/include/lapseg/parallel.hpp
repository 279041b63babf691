#pragma once

#include <cstddef>
#include <functional>

namespace lapseg {

// Worker cap taken from LAPSEG_THREADS (0 or unset = hardware concurrency).
// Applied once per process on first use.
std::size_t worker_count();

// Runs body(begin, end) over disjoint chunks of [0, n). Chunking is static, so
// any body that writes only to its own indices is deterministic.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace lapseg
