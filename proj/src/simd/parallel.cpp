#include "pks/simd/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pks::simd {

int thread_count() {
  static const int count = [] {
    if (const char* env = std::getenv("PKS_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }();
  return count;
}

void parallel_for(int begin, int end, const std::function<void(int, int)>& body, int min_chunk) {
  const int n = end - begin;
  if (n <= 0) return;
  int workers = std::min(thread_count(), std::max(1, n / std::max(1, min_chunk)));
  if (workers <= 1) {
    body(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 1; w < workers; ++w) {
    int lo = begin + w * chunk, hi = std::min(end, lo + chunk);
    if (lo < hi) pool.emplace_back(body, lo, hi);
  }
  body(begin, std::min(end, begin + chunk));
  for (auto& t : pool) t.join();
}

}  // namespace pks::simd
