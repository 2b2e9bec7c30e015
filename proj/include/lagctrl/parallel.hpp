#pragma once

// Thin OpenMP shim so the rest of the code never includes <omp.h> directly
// and still builds when OpenMP is unavailable.

#if defined(LAGCTRL_HAVE_OPENMP)
#include <omp.h>
#endif

namespace lagctrl::parallel {

inline int max_threads() {
#if defined(LAGCTRL_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// n <= 0 leaves the runtime default untouched.
inline void set_threads(int n) {
#if defined(LAGCTRL_HAVE_OPENMP)
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline bool in_parallel() {
#if defined(LAGCTRL_HAVE_OPENMP)
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

}  // namespace lagctrl::parallel
