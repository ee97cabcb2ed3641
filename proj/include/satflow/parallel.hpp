#pragma once

#ifdef _OPENMP
#include <omp.h>
#else
inline int omp_get_max_threads() { return 1; }
inline int omp_get_thread_num() { return 0; }
inline void omp_set_num_threads(int) {}
#endif

namespace satflow {

// Honors SATFLOW_THREADS as an upper bound on worker parallelism.
void apply_thread_cap_from_env();

}  // namespace satflow
