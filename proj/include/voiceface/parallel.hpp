#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace voiceface {

// Work is split into fixed-size chunks whose boundaries depend only on n,
// never on the worker count. Callers keep per-chunk partial results and
// combine them in chunk order, so outputs are identical for any --jobs.
inline constexpr long kParallelChunk = 4096;

inline long num_chunks(long n) { return (n + kParallelChunk - 1) / kParallelChunk; }

// Runs fn(chunk_index, begin, end) over [0, n). fn must restrict its writes
// to chunk-local or chunk-indexed state.
template <typename Fn>
inline void for_each_chunk(long n, int jobs, Fn&& fn) {
  const long chunks = num_chunks(n);
  if (jobs <= 1 || chunks <= 1) {
    for (long c = 0; c < chunks; ++c) {
      fn(c, c * kParallelChunk, std::min(n, (c + 1) * kParallelChunk));
    }
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long c = next.fetch_add(1);
      if (c >= chunks) {
        break;
      }
      fn(c, c * kParallelChunk, std::min(n, (c + 1) * kParallelChunk));
    }
  };
  std::vector<std::thread> threads;
  const int nt = static_cast<int>(std::min<long>(jobs, chunks));
  threads.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    threads.emplace_back(worker);
  }
  for (auto& th : threads) {
    th.join();
  }
}

}  // namespace voiceface
