#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace ssd {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must
// be independent; callers that need randomness derive a substream from the
// index so results do not depend on the schedule.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (count == 0) return;
  int nthreads = std::max(1, threads);
  if (nthreads == 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  nthreads = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(nthreads), count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([t, nthreads, count, &fn] {
      for (std::size_t i = static_cast<std::size_t>(t); i < count;
           i += static_cast<std::size_t>(nthreads)) {
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ssd
