// OpenMP shim. Include this instead of <omp.h>; builds without OpenMP get
// single-thread fallbacks and the pragmas compile away.
#pragma once

#define SATQKD_PRAGMA(X) _Pragma(#X)

#ifdef _OPENMP
#include <omp.h>
#define SATQKD_OMP(ARGS) SATQKD_PRAGMA(omp ARGS)
#else
#define SATQKD_OMP(ARGS)
#endif

namespace satqkd::parallel {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline int thread_id() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

/// Caps the worker count for subsequent parallel regions. n <= 0 leaves the
/// runtime default untouched.
inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace satqkd::parallel
