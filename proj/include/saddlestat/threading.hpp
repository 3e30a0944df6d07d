#pragma once

// Fork-join over fixed sample blocks. Blocks are cut at a constant size and
// reduced in block order, so results are bit-identical for any thread count.

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace saddlestat {

inline constexpr std::int64_t kSampleBlock = 4096;

// Runs fn(first, last) over [0, n) in blocks of kSampleBlock, possibly on
// several threads, and folds the per-block results in ascending block order.
template <typename Result>
Result parallel_blocks(std::int64_t n, int threads,
                       const std::function<Result(std::int64_t, std::int64_t)>& fn,
                       const std::function<void(Result&, const Result&)>& fold,
                       Result init) {
  const std::int64_t nblocks = (n + kSampleBlock - 1) / kSampleBlock;
  std::vector<Result> partial(static_cast<std::size_t>(nblocks), init);
  if (threads < 1) threads = 1;

  auto worker = [&](int w) {
    for (std::int64_t b = w; b < nblocks; b += threads) {
      const std::int64_t first = b * kSampleBlock;
      const std::int64_t last = std::min(n, first + kSampleBlock);
      partial[static_cast<std::size_t>(b)] = fn(first, last);
    }
  };

  if (threads == 1 || nblocks == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }

  Result total = init;
  for (const auto& p : partial) fold(total, p);
  return total;
}

}  // namespace saddlestat
