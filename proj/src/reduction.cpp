#include "curvstab/reduction.hpp"

#include <omp.h>

#include <atomic>

namespace curvstab {
namespace {

constexpr std::size_t kLeafSize = 8;
// Subtrees larger than this are spawned as tasks in the parallel variant.
constexpr std::size_t kTaskCutoff = 4096;

std::atomic<Execution> g_default_execution{Execution::parallel};

double sum_leaf(const double* data, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += data[i];
  return s;
}

double tree_sum(const double* data, std::size_t count) {
  if (count <= kLeafSize) return sum_leaf(data, count);
  const std::size_t half = count / 2;
  return tree_sum(data, half) + tree_sum(data + half, count - half);
}

double tree_sum_tasks(const double* data, std::size_t count) {
  if (count <= kTaskCutoff) return tree_sum(data, count);
  const std::size_t half = count / 2;
  double left = 0.0;
  double right = 0.0;
#pragma omp task shared(left)
  left = tree_sum_tasks(data, half);
#pragma omp task shared(right)
  right = tree_sum_tasks(data + half, count - half);
#pragma omp taskwait
  return left + right;
}

}  // namespace

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

Execution default_execution() { return g_default_execution.load(); }
void set_default_execution(Execution exec) { g_default_execution.store(exec); }

double pairwise_sum_serial(std::span<const double> values) {
  return tree_sum(values.data(), values.size());
}

double pairwise_sum_parallel(std::span<const double> values) {
  if (values.size() <= kTaskCutoff) return tree_sum(values.data(), values.size());
  double result = 0.0;
#pragma omp parallel
#pragma omp single
  result = tree_sum_tasks(values.data(), values.size());
  return result;
}

double pairwise_sum(std::span<const double> values, Execution exec) {
  return exec == Execution::parallel ? pairwise_sum_parallel(values) : pairwise_sum_serial(values);
}

}  // namespace curvstab
