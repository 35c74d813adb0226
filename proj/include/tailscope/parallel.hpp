#pragma once

// Seed derivation and chunked parallel execution.
//
// Work is cut into fixed-size chunks. Chunk c of stream s draws from its own
// engine seeded with substream_seed(master, c, s), and results are returned
// in chunk order, so the output does not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace tailscope {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of chunk `chunk` in stream `stream`:
/// mix64(mix64(mix64(master) ^ chunk) ^ stream).
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t chunk, std::uint64_t stream = 0) {
  return mix64(mix64(mix64(master) ^ chunk) ^ stream);
}

/// Requested thread count; 0 means TAILSCOPE_THREADS, then the hardware count.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TAILSCOPE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates fn(i) for i in [0, count) on up to `threads` workers and
/// returns the results in index order. The first exception is rethrown.
template <class T, class F>
std::vector<T> map_indexed(std::size_t count, unsigned threads, F&& fn) {
  std::vector<T> out(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace tailscope
