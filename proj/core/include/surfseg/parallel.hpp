#pragma once

#include <cstddef>
#include <functional>

namespace surfseg {

/// Worker cap resolved from SURFSEG_THREADS (0 or unset = hardware
/// concurrency). Read once per process.
int max_threads();

/// Runs fn(i) for i in [0, n). Work items must be independent and write only
/// to their own output slots, which keeps results identical to the sequential
/// order regardless of scheduling. Runs inline when n is small or only one
/// worker is available.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace surfseg
