#ifndef SPS_PARALLEL_HPP
#define SPS_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace sps {

/// Runs independent per-index work on a fixed number of worker threads.
///
/// Bodies must not communicate; any reduction happens afterwards, in index
/// order, on the calling thread. If several indices throw, the exception from
/// the smallest index is rethrown so diagnostics do not depend on scheduling.
class Executor {
 public:
  explicit Executor(int threads = 1) : threads_(threads < 1 ? 1 : threads) {
    if (threads_ > 1) {
      arena_ = std::make_unique<tbb::task_arena>(threads_);
    }
  }

  int threads() const noexcept { return threads_; }

  template <class Body>
  void for_each(std::size_t count, Body&& body) const {
    if (!arena_) {
      for (std::size_t i = 0; i < count; ++i) {
        body(i);
      }
      return;
    }
    std::mutex mutex;
    std::size_t failed_index = std::numeric_limits<std::size_t>::max();
    std::exception_ptr failure;
    arena_->execute([&] {
      tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count, 64), [&](const tbb::blocked_range<std::size_t>& r) {
        for (std::size_t i = r.begin(); i != r.end(); ++i) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(mutex);
            if (i < failed_index) {
              failed_index = i;
              failure = std::current_exception();
            }
          }
        }
      });
    });
    if (failure) {
      std::rethrow_exception(failure);
    }
  }

 private:
  int threads_;
  std::unique_ptr<tbb::task_arena> arena_;
};

}  // namespace sps

#endif
