#pragma once

#include <cstddef>
#include <functional>

namespace pv5 {

// Worker count: hardware concurrency, capped by PV5_THREADS when set.
unsigned worker_count();

// Calls task(i) for 0 <= i < count on up to worker_count() threads. Tasks
// must write only to their own slot; the first exception is rethrown after
// all workers finish.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& task);

}  // namespace pv5
