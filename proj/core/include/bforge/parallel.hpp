#pragma once

#include <cstddef>
#include <functional>

namespace bforge {

// Worker count used by the parallel loops; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once and the
// callers only write to slot i, so results never depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bforge
