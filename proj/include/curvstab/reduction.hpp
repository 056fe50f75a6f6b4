#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>

namespace curvstab {

enum class Execution { serial, parallel };

/// Sets the OpenMP thread count used by Execution::parallel kernels.
void set_thread_count(int threads);
int thread_count();

/// Execution policy used by the grid kernels when none is passed explicitly.
Execution default_execution();
void set_default_execution(Execution exec);

/// Fixed-tree pairwise sum. Serial reference implementation.
double pairwise_sum_serial(std::span<const double> values);

/// Same summation tree as pairwise_sum_serial, subtrees evaluated as OpenMP tasks.
/// Bit-identical to the serial result for any thread count.
double pairwise_sum_parallel(std::span<const double> values);

double pairwise_sum(std::span<const double> values, Execution exec = default_execution());

/// Calls fn(i) for i in [0, count). Each call must only write state owned by index i.
/// The first exception thrown by any call is rethrown after the loop.
template <class Fn>
void map_nodes(std::size_t count, Fn&& fn, Execution exec = default_execution()) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto total = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < total; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace curvstab
