#pragma once

#include <cstddef>
#include <functional>

namespace zenograv {

// Worker count: ZENOGRAV_THREADS when set to a positive integer, else the
// hardware concurrency.
unsigned thread_count();

// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers
// write results into pre-sized slots so output order never depends on
// scheduling. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace zenograv
