#pragma once

#include <functional>

namespace pks::simd {

// Worker count: PKS_THREADS if set (>= 1), otherwise the hardware concurrency.
int thread_count();

// Calls body(lo, hi) on contiguous chunks of [begin, end). The partition depends
// only on the range and thread_count(), so results are reproducible for a fixed
// thread count.
void parallel_for(int begin, int end, const std::function<void(int, int)>& body,
                  int min_chunk = 16);

}  // namespace pks::simd
