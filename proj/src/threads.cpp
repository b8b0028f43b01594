#include "csweep/threads.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csweep {

void set_max_threads(int count) {
  if (count < 1) return;
#ifdef _OPENMP
  omp_set_num_threads(count);
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace csweep
