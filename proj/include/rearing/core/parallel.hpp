#pragma once

#include <atomic>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rearing::par {

enum class Mode { Serial, OpenMP };

inline std::atomic<Mode>& mode_flag() {
    static std::atomic<Mode> m{Mode::OpenMP};
    return m;
}

inline Mode mode() { return mode_flag().load(std::memory_order_relaxed); }
inline void set_mode(Mode m) { mode_flag().store(m, std::memory_order_relaxed); }

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Run f(i) for i in [0, n). Iterations must be independent and each write
/// disjoint state; under that contract results are bit-identical in Serial
/// and OpenMP mode for any thread count.
template <class F>
inline void for_n(std::int64_t n, F&& f) {
#ifdef _OPENMP
    if (mode() == Mode::OpenMP && n > 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) f(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) f(i);
}

/// RAII guard for forcing an execution mode within a scope (tests, benchmark).
struct ModeGuard {
    Mode saved;
    explicit ModeGuard(Mode m) : saved(mode()) { set_mode(m); }
    ~ModeGuard() { set_mode(saved); }
};

}  // namespace rearing::par
