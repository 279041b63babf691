#include "lapseg/parallel.hpp"

#include <oneapi/tbb/blocked_range.h>
#include <oneapi/tbb/global_control.h>
#include <oneapi/tbb/info.h>
#include <oneapi/tbb/parallel_for.h>
#include <oneapi/tbb/partitioner.h>

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

namespace lapseg {
namespace {

std::size_t configure() {
  std::size_t workers = static_cast<std::size_t>(tbb::info::default_concurrency());
  if (const char* env = std::getenv("LAPSEG_THREADS")) {
    char* end = nullptr;
    const unsigned long requested = std::strtoul(env, &end, 10);
    if (end != env && requested > 0) workers = requested;
  }
  static std::unique_ptr<tbb::global_control> control;
  control = std::make_unique<tbb::global_control>(
      tbb::global_control::max_allowed_parallelism, workers);
  return workers;
}

}  // namespace

std::size_t worker_count() {
  static std::once_flag once;
  static std::size_t workers = 1;
  std::call_once(once, [] { workers = configure(); });
  return workers;
}

void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  if (worker_count() <= 1 || n <= grain) {
    body(0, n);
    return;
  }
  tbb::parallel_for(
      tbb::blocked_range<std::size_t>(0, n, grain == 0 ? 1 : grain),
      [&](const tbb::blocked_range<std::size_t>& r) { body(r.begin(), r.end()); },
      tbb::static_partitioner());
}

}  // namespace lapseg
