#pragma once

#include <cstddef>
#include <functional>

namespace qcm {

/// Worker count: QCM_THREADS environment variable if set, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Run fn(i) for i in [0, n) across workers with a static partition. Output
/// written by fn must go to disjoint, preallocated slots so the result does
/// not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace qcm
