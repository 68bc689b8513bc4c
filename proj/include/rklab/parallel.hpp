#pragma once

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rklab {

// Runs fn(r) for replicates r in [0, n), collecting results in replicate
// order. Replicates must be independent (each derives its own rng stream),
// so the result is identical for any thread count; threads <= 1 uses the
// serial reference loop.
template <class T, class Fn>
std::vector<T> run_replicates(long n, int threads, Fn&& fn) {
    std::vector<T> out(static_cast<size_t>(n));
    if (threads <= 1) {
        for (long r = 0; r < n; ++r) out[static_cast<size_t>(r)] = fn(r);
        return out;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long r = 0; r < n; ++r) out[static_cast<size_t>(r)] = fn(r);
#else
    for (long r = 0; r < n; ++r) out[static_cast<size_t>(r)] = fn(r);
#endif
    return out;
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace rklab
