// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/threads.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfseeker {

int init_threads() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char *env = std::getenv("RFSEEKER_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap >= 1 && cap < n)
                n = cap;
        } catch (...) {
            // ignore malformed values
        }
    }
    omp_set_num_threads(n);
    return n;
#else
    return 1;
#endif
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace rfseeker
