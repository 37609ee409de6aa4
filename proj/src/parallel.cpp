#include "efc/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace efc::parallel {

namespace {
int g_threads = 0;
}

int max_threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

void set_max_threads(int threads) {
  g_threads = threads > 0 ? threads : 0;
  if (g_threads > 0) omp_set_num_threads(g_threads);
}

int init_from_env() {
  if (const char* env = std::getenv("EFC_THREADS")) {
    try {
      set_max_threads(std::stoi(env));
    } catch (...) {
      // ignore malformed values
    }
  }
  return max_threads();
}

}  // namespace efc::parallel
