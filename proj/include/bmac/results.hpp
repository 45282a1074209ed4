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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bmac/bounded_queue.hpp"

namespace bmac {

enum class TxFlag : std::uint8_t { valid, invalid_sig, invalid_policy, invalid_mvcc, skipped_block_invalid };

std::string_view flag_name(TxFlag f);
TxFlag parse_flag(std::string_view s);

enum class BlockStatus : std::uint8_t { ok, capacity_exceeded, incomplete };

std::string_view status_name(BlockStatus s);
BlockStatus parse_status(std::string_view s);

struct BlockStats {
  // Busy time per stage, microseconds (tx stages summed over lanes).
  double block_verify_us = 0;
  double tx_verify_us = 0;
  double vscc_us = 0;
  double mvcc_us = 0;
  // Signature verifications issued to engines.
  std::uint64_t block_verifications = 0;
  std::uint64_t tx_verifications = 0;
  std::uint64_t endorsement_verifications = 0;
  // Queue occupancy when the block entered validation.
  std::uint64_t tx_fifo_depth = 0;
  std::uint64_t ends_fifo_depth = 0;
  std::uint64_t collector_max_pending = 0;
  // First FIFO emission to result publication.
  double latency_us = 0;
  // Steady-clock stamps (ns) of validation start and publication.
  std::int64_t started_ns = 0;
  std::int64_t finished_ns = 0;
  // Per transaction.
  std::vector<float> tx_vscc_us;
  std::vector<std::uint8_t> tx_endorsement_verifications;
};

struct ValidationResult {
  std::uint64_t block_num = 0;
  bool block_valid = false;
  std::uint32_t num_txs = 0;
  BlockStatus status = BlockStatus::ok;
  std::vector<TxFlag> flags;
  BlockStats stats;
};

/// Result hand-off to the host. With depth 1 a second publish waits until
/// the previous result has been read, so nothing is ever overwritten.
class ResultMailbox {
 public:
  explicit ResultMailbox(std::size_t depth = 1) : q_(depth) {}

  /// Blocks while the mailbox is full. Returns false after close().
  bool publish(ValidationResult r) { return q_.push(std::move(r)); }
  /// Blocks until a result is available; nullopt once closed and drained.
  std::optional<ValidationResult> get_block_data() { return q_.pop(); }
  template <typename Rep, typename Period>
  std::optional<ValidationResult> get_block_data_for(std::chrono::duration<Rep, Period> timeout) {
    return q_.pop_for(timeout);
  }
  void close() { q_.close(); }

  std::size_t depth() const { return q_.capacity(); }
  std::size_t unread() const { return q_.size(); }
  std::size_t max_unread() const { return q_.high_water(); }
  std::size_t blocked_publishers() const { return q_.blocked_pushers(); }
  std::size_t stalled_publishes() const { return q_.full_waits(); }
  std::size_t published() const { return q_.pushed(); }

 private:
  BoundedQueue<ValidationResult> q_;
};

/// One JSON object per line. Per-transaction stats are optional to keep
/// files small on long runs.
std::string to_json_line(const ValidationResult& r, bool per_tx_stats = false);
ValidationResult from_json_line(std::string_view line);
std::vector<ValidationResult> read_results(const std::string& path);

}  // namespace bmac
