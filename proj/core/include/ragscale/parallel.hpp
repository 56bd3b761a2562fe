#pragma once

#include <cstddef>
#include <functional>

namespace ragscale {

/// Worker count from RAGSCALE_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Each index is processed exactly once; callers
/// write results into slot i so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ragscale
