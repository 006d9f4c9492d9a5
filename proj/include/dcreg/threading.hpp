#ifndef DCREG_THREADING_HPP
#define DCREG_THREADING_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dcreg {

/// Thread budget from DCREG_THREADS. Unset/invalid -> 1, 0 -> hardware auto.
inline unsigned thread_budget() {
  const char* env = std::getenv("DCREG_THREADS");
  if (env == nullptr) return 1;
  const long parsed = std::strtol(env, nullptr, 10);
  if (parsed < 0) return 1;
  if (parsed == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
  return static_cast<unsigned>(parsed);
}

/// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries do
/// not depend on the thread count, so per-chunk partial results reduced in
/// chunk order give bitwise-identical output for any DCREG_THREADS value.
inline void parallel_chunks(std::size_t n, std::size_t chunk,
                            const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned threads = thread_budget();
  const std::size_t num_chunks = (n + chunk - 1) / chunk;
  if (threads <= 1 || num_chunks <= 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) {
      fn(c * chunk, std::min(n, (c + 1) * chunk));
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::atomic<std::size_t> next{0};
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= num_chunks) return;
        fn(c * chunk, std::min(n, (c + 1) * chunk));
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dcreg

#endif
