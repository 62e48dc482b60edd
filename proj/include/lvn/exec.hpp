// exec.hpp — execution-mode switch shared by the numerical kernels: a serial
// reference loop and an OpenMP worker loop over the same per-index body.
#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lvn {

// Serial is the reference implementation; Parallel distributes independent
// iterations across OpenMP threads. Every kernel written on top of
// parallel_for assigns each iteration to its own output slot, so the two
// modes produce bitwise-identical results (asserted by the test suite).
enum class ExecMode { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs fn(i) for i in [0, n). Parallel mode uses a static schedule so the
// partition is deterministic; bodies must not touch shared mutable state
// other than their own slot.
template <typename F>
void parallel_for(std::ptrdiff_t n, ExecMode mode, F&& fn) {
#ifdef _OPENMP
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
    return;
  }
#else
  (void)mode;
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
}

}  // namespace lvn
