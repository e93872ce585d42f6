#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace impsum {

/// Resolves a --jobs request: 0 or negative means "all hardware threads".
inline int effective_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs <= 0) {
        return omp_get_max_threads();
    }
    return jobs;
#else
    (void)jobs;
    return 1;
#endif
}

/// Data-parallel map over [0, n). Every index must write only its own output
/// slot; under that contract results are identical for any job count, and
/// jobs == 1 is the serial reference path the tests compare against.
///
/// The first exception thrown by any iteration is rethrown on the calling
/// thread once the loop drains (OpenMP regions must not leak exceptions).
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
    const int threads = effective_jobs(jobs);
#ifdef _OPENMP
    if (threads > 1 && n > 1) {
        std::exception_ptr error;
        std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
        if (error) {
            std::rethrow_exception(error);
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) {
        body(i);
    }
}

} // namespace impsum
