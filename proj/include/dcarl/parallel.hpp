#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace dcarl {

// Worker count from DCARL_SIM_THREADS (0 or unset = hardware concurrency).
inline unsigned sim_threads() {
  unsigned n = 0;
  if (const char* env = std::getenv("DCARL_SIM_THREADS")) {
    try {
      n = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      n = 0;
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

// Runs fn(chunk_index, first, last) over [0, count) split into fixed-size
// chunks. Chunk boundaries do not depend on the thread count, so callers that
// reduce per-chunk results in chunk order get identical sums for any
// parallelism.
template <typename Fn>
void for_each_chunk(std::size_t count, std::size_t chunk, Fn&& fn) {
  if (count == 0) return;
  chunk = std::max<std::size_t>(1, chunk);
  const std::size_t chunks = (count + chunk - 1) / chunk;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(sim_threads(), chunks));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t c = next++; c < chunks; c = next++)
        fn(c, c * chunk, std::min(count, (c + 1) * chunk));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dcarl
