#pragma once

#include <functional>

namespace bbq {

// Worker cap: BBQ_THREADS when set, otherwise hardware concurrency.
int recommended_threads();

// Runs fn(0..count-1) on up to `threads` workers. Jobs must be independent;
// exceptions are rethrown (first one wins) after all workers join.
void parallel_for_jobs(int count, int threads,
                       const std::function<void(int)>& fn);

}  // namespace bbq
