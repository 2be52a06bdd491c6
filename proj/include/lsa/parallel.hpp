#pragma once

#include <cstddef>
#include <functional>

namespace lsa {

/// Worker count from LSA_WORKERS, falling back to the hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Each
/// index is executed exactly once; callers write results into slot i so the
/// merged output never depends on scheduling. The first exception thrown by
/// any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lsa
