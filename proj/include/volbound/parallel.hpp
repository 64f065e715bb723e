#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace volbound {

/// Paths per work unit. Reductions always combine chunk results in chunk
/// order, so results do not depend on the worker count.
inline constexpr std::size_t kChunkSize = std::size_t{1} << 16;

/// Worker count: hardware concurrency, capped by VOLBOUND_THREADS when set.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VOLBOUND_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    } catch (const std::exception&) {
    }
  }
  return hw;
}

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

/// Calls body(chunk, begin, end) for every chunk of [0, n). Chunks are handed
/// out dynamically; body must only write state owned by its chunk.
template <class Body>
void for_each_chunk(std::size_t n, Body&& body) {
  const std::size_t chunks = chunk_count(n);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(chunks, 1)));
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize;
    body(c, begin, std::min(n, begin + kChunkSize));
  };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
          try {
            run_chunk(c);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = chunks;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace volbound
