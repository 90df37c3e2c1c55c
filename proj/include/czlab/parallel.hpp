#pragma once

#include <cstddef>
#include <functional>

namespace czlab {

// Thread budget for parallel_for.  Defaults to the hardware count; CLI --threads
// overrides it.  Chunk boundaries depend only on (n, thread count), so results
// are reproducible for a fixed budget.
void set_max_threads(int n);
int max_threads();

// Runs fn(begin, end) over a fixed partition of [0, n).  fn must only write to
// disjoint state per chunk; combine reductions afterwards in chunk order.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace czlab
