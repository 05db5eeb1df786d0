#include "cmimo/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>

namespace cmimo {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("COMPOUND_MIMO_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) threads = std::min(threads, cap);
  }
  return std::max(threads, 1);
}

}  // namespace cmimo
