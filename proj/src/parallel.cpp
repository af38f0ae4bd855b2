#include "romaeh/parallel.hpp"

#include <omp.h>

#include <cstdlib>

namespace romaeh {

namespace {
int g_threads = -1;  // -1: not resolved yet
}

void set_thread_count(int n) {
  g_threads = n > 0 ? n : 0;
  if (g_threads > 0) omp_set_num_threads(g_threads);
}

int thread_count() {
  if (g_threads < 0) {
    int n = 0;
    if (const char* env = std::getenv("ROMAEH_THREADS")) {
      n = std::atoi(env);
      if (n < 0) n = 0;
    }
    set_thread_count(n);
  }
  return g_threads > 0 ? g_threads : omp_get_max_threads();
}

}  // namespace romaeh
