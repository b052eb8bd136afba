#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace textmountain {

/// Worker count to use: `requested` if positive, else $TM_WORKERS if set and
/// positive, else the hardware concurrency (at least 1).
int resolve_workers(int requested = 0);

/// Splits [0, n) into contiguous chunks and runs fn(begin, end) on up to
/// `workers` threads. Runs inline when one worker suffices.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(n, 1));
  if (w <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(w - 1);
  const std::size_t chunk = (n + w - 1) / w;
  for (std::size_t t = 1; t < w; ++t) {
    const std::size_t begin = std::min(n, t * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(n, chunk));
}

}  // namespace textmountain
