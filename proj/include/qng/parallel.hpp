#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace qng {

/// Serial is the reference path; parallel runs the same per-index kernel
/// under OpenMP and must produce bit-identical results.
enum class Execution { serial, parallel };

/// Worker count for parallel kernels: QNG_THREADS when set to a positive
/// integer, otherwise the OpenMP default.
int worker_count();

/**
 * Runs body(i) for i in [0, count). Each index writes only its own output
 * slot, so the result does not depend on scheduling. The first exception
 * thrown by any worker is rethrown on the calling thread.
 */
template <class Body>
void for_each_index(Execution exec, std::size_t count, Body&& body) {
  if (exec == Execution::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace qng
