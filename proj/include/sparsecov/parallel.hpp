#pragma once

#include <functional>

namespace sparsecov {

// Runs body(0), ..., body(count-1) on up to `threads` workers (0 = machine
// parallelism). Work items must be independent; callers get deterministic
// results by writing into preassigned slots. The lowest-index exception is
// rethrown after all workers join.
void parallel_for(long count, int threads,
                  const std::function<void(long)>& body);

}  // namespace sparsecov
