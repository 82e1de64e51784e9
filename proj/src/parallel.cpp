#include "disloc/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace disloc {

int worker_count() {
  static const int cached = [] {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("DISLOC_THREADS")) {
      try {
        const int cap = std::stoi(env);
        if (cap >= 1 && cap < n) n = cap;
      } catch (...) {
        // Unparseable cap: ignore and keep the OpenMP default.
      }
    }
    return n < 1 ? 1 : n;
  }();
  return cached;
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = v[0];
    for (std::size_t i = 1; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace disloc
