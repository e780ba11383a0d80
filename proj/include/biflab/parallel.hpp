#pragma once

#include <cstddef>
#include <functional>

namespace biflab {

/// Worker count: BIFLAB_THREADS if set and positive, else the hardware count.
unsigned thread_count();

/// Calls body(i) for i in [0, n) on up to thread_count() threads. Iterations
/// must write only to their own slots; results never depend on the schedule.
/// The first exception thrown by a body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace biflab
