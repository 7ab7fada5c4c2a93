#pragma once

#include <functional>

namespace spfh {

// Process-wide concurrency budget shared by all parallel loops.
void set_worker_budget(int workers);
int worker_budget();

// Runs fn(0..count-1) on up to worker_budget() threads. Nested calls run
// serially. The first exception thrown by fn is rethrown after all workers
// have stopped.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace spfh
