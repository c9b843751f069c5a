// Execution switch for the data-parallel kernels. The serial path is the
// reference implementation; the OpenMP path must produce bitwise-identical
// results because work items write disjoint outputs from immutable inputs.
#pragma once

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace hjb {

enum class Exec { serial, openmp };

template <typename F>
void parallel_for(int n, Exec exec, F&& body) {
    if (exec == Exec::openmp) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) body(i);
        return;
#endif
    }
    for (int i = 0; i < n; ++i) body(i);
}

inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace hjb
