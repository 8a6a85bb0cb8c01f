#pragma once

#include <cstddef>
#include <functional>

namespace isodiam {

/// Worker count from ISODIAM_WORKERS (default: hardware concurrency). Never
/// changes results, only wall time.
unsigned worker_count();

/// Calls body(begin, end) over disjoint chunks covering [0, count).
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace isodiam
