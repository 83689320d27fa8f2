#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fluidic {

// Worker count from FLUIDIC_WORKERS, else the OpenMP default, else 1.
inline int default_workers() {
    if (const char* env = std::getenv("FLUIDIC_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (...) {
        }
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Serial reference: body(i) for i in [0, n) in order.
template <typename Body>
void for_each_game_serial(std::size_t n, Body&& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

// Parallel kernel over independent games. Bodies must write only to slot i
// of a pre-sized output; callers reduce in index order afterwards, so the
// result never depends on the schedule.
template <typename Body>
void for_each_game(std::size_t n, int workers, Body&& body) {
    if (workers <= 0) workers = default_workers();
#ifdef _OPENMP
    if (workers > 1 && n > 1) {
        const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
        return;
    }
#endif
    for_each_game_serial(n, body);
}

} // namespace fluidic
