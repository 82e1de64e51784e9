#pragma once

#include <cstddef>
#include <vector>

namespace disloc {

// Execution policy for the heavy kernels.  Parallel uses OpenMP worker
// threads; Serial runs the same panel enumeration on one thread.  Both
// policies store per-panel partial results into an indexed array and reduce
// it in a fixed pairwise order, so the result is bitwise identical no matter
// which policy (or thread count) produced it.
enum class Exec { Serial, Parallel };

// Worker cap: min(OMP max threads, DISLOC_THREADS if set).  Parsed once.
int worker_count();

// Deterministic pairwise reduction of v[begin, end).
double pairwise_sum(const double* v, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

// Run fn(i) for i in [0, n) under the given policy and return the pairwise
// sum of the results.  fn must be safe to call concurrently.
template <class Fn>
double indexed_sum(std::size_t n, Exec exec, Fn&& fn) {
  std::vector<double> part(n, 0.0);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      part[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) part[i] = fn(i);
  }
  return pairwise_sum(part);
}

}  // namespace disloc
