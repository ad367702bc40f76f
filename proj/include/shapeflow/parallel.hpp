#pragma once

#include <cstddef>
#include <functional>

namespace shapeflow {

/// Worker cap for parallel_for. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(begin, end) over disjoint chunks of [0, n). Chunks never share
/// an index, so bodies writing only their own slots need no synchronization.
/// After all chunks join, the exception of the lowest-indexed failing chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace shapeflow
