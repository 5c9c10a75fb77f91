#pragma once

#include <cstddef>
#include <functional>

namespace warped {

/// Worker count: hardware concurrency, capped by WARPED_DISK_THREADS when set.
unsigned worker_count();

/// Run body(i) for i in [0, n). Each index writes only its own result slot, so
/// the outcome does not depend on scheduling. After all workers finish, the
/// exception of the lowest failing index (if any) is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace warped
