#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace omnizoom {

inline constexpr Eigen::Index kBandRows = 64;

/// 0 means "use the hardware concurrency".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(row_begin, row_end) over disjoint bands of [0, rows). Bands are
/// claimed dynamically, so bodies must only write rows they were handed.
template <typename Body>
void parallel_for_bands(Eigen::Index rows, int threads, Body&& body, Eigen::Index band = kBandRows) {
  if (rows <= 0) return;
  const Eigen::Index bands = (rows + band - 1) / band;
  const int workers = static_cast<int>(std::min<Eigen::Index>(resolve_threads(threads), bands));
  if (workers <= 1) {
    body(Eigen::Index{0}, rows);
    return;
  }

  std::atomic<Eigen::Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const Eigen::Index b = next.fetch_add(1);
      if (b >= bands) return;
      try {
        body(b * band, std::min(rows, (b + 1) * band));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(bands);
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace omnizoom
