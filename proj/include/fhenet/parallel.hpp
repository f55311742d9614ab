// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fhenet {

/// Execution policy for grid-level kernels. Every parallel kernel has a
/// serial twin (same loop body, no pragma) used as reference in tests and
/// in the kernel benchmark.
enum class Exec { kSerial, kParallel };

/// Index-parallel loop. Exceptions thrown by the body are captured and
/// rethrown on the calling thread after the loop joins.
template <typename Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::kSerial || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr err;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(fhenet_parallel_for_err)
#endif
            {
                if (!err) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace fhenet
