// SPDX-License-Identifier: Apache-2.0

#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace csifb {

// Fans fn(i), i in [0, count), across OpenMP threads. threads == 1 is the
// serial reference path, 0 lets OpenMP pick. Tasks must write only to their
// own output slots; callers reduce the slots sequentially afterwards so
// results are identical at any thread count.
template <typename Fn>
void parallel_for(long count, int threads, Fn&& fn) {
    if (threads == 1) {
        for (long i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
#ifdef _OPENMP
    if (threads > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long i = 0; i < count; ++i) {
            fn(i);
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) {
            fn(i);
        }
    }
#else
    for (long i = 0; i < count; ++i) {
        fn(i);
    }
#endif
}

} // namespace csifb
