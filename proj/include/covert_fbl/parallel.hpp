#pragma once

#include <cstddef>
#include <functional>

namespace covert_fbl {

/// Worker count: hardware concurrency, capped by COVERT_FBL_THREADS when set.
unsigned default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// executed exactly once; callers write results into pre-sized slots so the
/// outcome does not depend on scheduling. The first exception thrown by any
/// body is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace covert_fbl
