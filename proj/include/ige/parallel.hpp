#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace ige::detail {

/// Rows per work block. Block boundaries are a function of the image shape
/// only, so per-block partial results reduced in block order give the same
/// bits for any thread count.
inline constexpr int kRowsPerBlock = 16;

inline std::size_t block_count(int rows) {
  return rows <= 0 ? 0 : std::size_t((rows + kRowsPerBlock - 1) / kRowsPerBlock);
}

/// Runs fn(block) for block in [0, blocks) on up to `threads` workers.
/// The first exception thrown by any block is rethrown on the caller.
template <typename Fn>
void parallel_blocks(std::size_t blocks, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      try {
        fn(b);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

/// Splits [0, n) into `chunk`-sized ranges and runs fn(begin, end) on each.
template <typename Fn>
void parallel_ranges(std::size_t n, std::size_t chunk, int threads, Fn&& fn) {
  const std::size_t blocks = (n + chunk - 1) / chunk;
  parallel_blocks(blocks, threads, [&](std::size_t b) {
    fn(b * chunk, std::min(n, (b + 1) * chunk));
  });
}

/// Row range [first, last) covered by a block.
inline std::pair<int, int> block_rows(std::size_t block, int rows) {
  const int first = int(block) * kRowsPerBlock;
  return {first, std::min(rows, first + kRowsPerBlock)};
}

}  // namespace ige::detail
