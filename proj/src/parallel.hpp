// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SBSS_SRC_PARALLEL_HPP_
#define SBSS_SRC_PARALLEL_HPP_

#include <atomic>
#include <exception>
#include <mutex>
#include <string>

namespace sbss::detail {

/// Exceptions may not cross an OpenMP region; this keeps the first message.
class ErrorSlot {
 public:
  template <class Fn>
  void run(Fn&& fn) {
    if (failed_.load(std::memory_order_relaxed)) return;
    try {
      fn();
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!failed_.exchange(true)) message_ = e.what();
    }
  }
  bool failed() const { return failed_.load(); }
  const std::string& message() const { return message_; }

 private:
  std::atomic<bool> failed_{false};
  std::mutex mutex_;
  std::string message_;
};

}  // namespace sbss::detail

#endif  // SBSS_SRC_PARALLEL_HPP_
