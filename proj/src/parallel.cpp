#include "netreg/parallel.hpp"

#include <omp.h>

namespace netreg {

namespace {
int default_threads() {
  static const int value = omp_get_max_threads();
  return value;
}
}  // namespace

void set_num_threads(int threads) {
  const int fallback = default_threads();
  const int chosen = threads > 0 ? threads : fallback;
  omp_set_num_threads(chosen);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace netreg
