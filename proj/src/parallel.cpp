#include "satflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace satflow {

void apply_thread_cap_from_env() {
  const char* env = std::getenv("SATFLOW_THREADS");
  if (!env) return;
  const int cap = std::atoi(env);
  if (cap >= 1) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
}

}  // namespace satflow
