#pragma once

#include <cstddef>
#include <functional>

namespace kw {

// Process-wide worker count used by parallel_for; 1 means run inline.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [begin, end). Each index is written by exactly one worker,
// so results do not depend on the schedule.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& fn);

}  // namespace kw
