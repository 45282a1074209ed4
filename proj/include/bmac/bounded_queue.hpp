// Copyright 2026 The BMac Peer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <limits>
#include <mutex>
#include <optional>

namespace bmac {

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Blocking FIFO. push() waits while full, pop() waits while empty; close()
/// wakes everyone, after which pop() drains what is left and then returns
/// nullopt and push() returns false.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity = kUnbounded) : capacity_(capacity == 0 ? 1 : capacity) {}

  bool push(T value) {
    std::unique_lock lock(mu_);
    if (items_.size() >= capacity_ && !closed_) {
      ++blocked_pushers_;
      ++full_waits_;
      not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
      --blocked_pushers_;
    }
    if (closed_) return false;
    items_.push_back(std::move(value));
    if (items_.size() > high_water_) high_water_ = items_.size();
    ++pushed_;
    lock.unlock();
    not_empty_.notify_one();
    return true;
  }

  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    return take(lock);
  }

  template <typename Rep, typename Period>
  std::optional<T> pop_for(std::chrono::duration<Rep, Period> timeout) {
    std::unique_lock lock(mu_);
    not_empty_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; });
    return take(lock);
  }

  /// Waits for at least one item, then takes everything queued (appended
  /// to `out`). Returns false once closed and drained.
  bool pop_all(std::deque<T>& out) {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return false;
    bool was_full = items_.size() >= capacity_;
    for (auto& v : items_) out.push_back(std::move(v));
    items_.clear();
    lock.unlock();
    if (was_full) not_full_.notify_all();
    return true;
  }

  std::optional<T> try_pop() {
    std::unique_lock lock(mu_);
    return take(lock);
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }
  std::size_t high_water() const {
    std::lock_guard lock(mu_);
    return high_water_;
  }
  std::size_t pushed() const {
    std::lock_guard lock(mu_);
    return pushed_;
  }
  /// Producers currently parked on a full queue.
  std::size_t blocked_pushers() const {
    std::lock_guard lock(mu_);
    return blocked_pushers_;
  }
  /// Pushes that found the queue full and had to wait.
  std::size_t full_waits() const {
    std::lock_guard lock(mu_);
    return full_waits_;
  }
  std::size_t capacity() const { return capacity_; }

 private:
  std::optional<T> take(std::unique_lock<std::mutex>& lock) {
    if (items_.empty()) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return v;
  }

  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
  std::size_t high_water_ = 0;
  std::size_t pushed_ = 0;
  std::size_t blocked_pushers_ = 0;
  std::size_t full_waits_ = 0;
};

}  // namespace bmac
