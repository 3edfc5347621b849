#ifndef DGHEAT_PARALLEL_HPP
#define DGHEAT_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dgheat {

// Shared-memory execution policy for the element-loop kernels. Every kernel
// with a Parallel path has a Serial twin that produces identical results;
// the test suite runs both and the benchmark tool compares their timings.
enum class Exec { Serial, Parallel };

template <typename Fn>
inline void for_each_index(Exec exec, std::size_t n, Fn&& fn) {
#ifdef _OPENMP
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

// Max-reduction over an index range. Floating-point max is associative, so
// the parallel result is bit-identical to the serial one.
template <typename Fn>
inline double max_over(Exec exec, std::size_t n, Fn&& fn) {
    double best = 0.0;
#ifdef _OPENMP
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(max : best)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            double v = fn(static_cast<std::size_t>(i));
            if (v > best) best = v;
        }
        return best;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) {
        double v = fn(i);
        if (v > best) best = v;
    }
    return best;
}

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace dgheat

#endif
