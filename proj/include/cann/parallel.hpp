#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace cann {

/// Splits [0, count) into contiguous chunks and runs fn(begin, end, worker) on
/// up to `threads` workers. The first exception thrown by a worker is rethrown.
template <typename F>
void parallel_for(std::size_t count, std::size_t threads, F&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    if (count > 0) fn(std::size_t{0}, count, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&, begin, end, w] {
        try {
          fn(begin, end, w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Per-query "seen" marks over a dense id range, reset in O(1) by bumping an
/// epoch counter.
class StampSet {
 public:
  explicit StampSet(std::size_t size = 0) : stamps_(size, 0) {}

  void reset(std::size_t size) {
    if (stamps_.size() < size) stamps_.resize(size, 0);
    if (++epoch_ == 0) {
      std::fill(stamps_.begin(), stamps_.end(), 0);
      epoch_ = 1;
    }
  }

  /// True if id was not yet marked in the current epoch.
  bool insert(std::size_t id) {
    if (id >= stamps_.size()) stamps_.resize(id + 1, 0);
    if (stamps_[id] == epoch_) return false;
    stamps_[id] = epoch_;
    return true;
  }

 private:
  std::vector<std::uint32_t> stamps_;
  std::uint32_t epoch_ = 0;
};

}  // namespace cann
