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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "bmac/bounded_queue.hpp"
#include "bmac/fifo_entries.hpp"
#include "bmac/policy.hpp"
#include "bmac/results.hpp"
#include "bmac/statedb.hpp"
#include "bmac/verify_engine.hpp"

namespace bmac {

struct PipelineConfig {
  unsigned lanes = 4;              // parallel tx_verify + tx_vscc instances
  unsigned engines_per_vscc = 2;   // verification slots per tx_vscc
  std::optional<std::chrono::microseconds> synthetic_delay;
  unsigned max_blocks_in_flight = 2;

  /// Throws ConfigError on zero lanes/engines.
  void validate() const;
};

struct PipelineCounters {
  std::uint64_t blocks = 0;
  std::uint64_t txs = 0;
  std::uint64_t block_verifications = 0;
  std::uint64_t tx_verifications = 0;
  std::uint64_t endorsement_verifications = 0;
  std::uint64_t unknown_principals = 0;
  std::uint64_t stalled_publishes = 0;
};

/// Block validation pipeline: block_verify, then tx lanes (signature check
/// followed by short-circuit policy evaluation), an in-order collector and
/// the MVCC/commit stage, which is the only writer to the store. Every
/// stage runs on its own thread; stages talk through bounded queues.
class Pipeline {
 public:
  /// `engine` defaults to real verification, or to a synthetic engine with
  /// real verdicts when config.synthetic_delay is set.
  Pipeline(FifoSet& fifos, KvStore& store, const PolicyTable& policies, ResultMailbox& results,
           PipelineConfig config, std::shared_ptr<VerifyEngine> engine = nullptr);
  ~Pipeline();

  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  void start();
  /// Closes the input FIFOs, lets queued blocks drain, joins and closes the
  /// mailbox. Rethrows the first stage failure, if any.
  void finish();
  /// Tears everything down without draining.
  void stop();

  PipelineCounters counters() const;
  const PipelineConfig& config() const { return config_; }
  const VerifyEngine& engine() const { return *engine_; }

 private:
  struct BlockCtx {
    BlockFifoEntry entry;
    bool valid = false;
    BlockStatus status = BlockStatus::ok;
    Clock::time_point started{};
    double block_verify_us = 0;
    std::uint64_t tx_fifo_depth = 0;
    std::uint64_t ends_fifo_depth = 0;
    std::uint64_t collector_max_pending = 0;
    double mvcc_us = 0;
    // Indexed by tx_num; each slot written by exactly one stage.
    std::vector<TxFlag> flags;
    std::vector<float> tx_verify_us;
    std::vector<float> vscc_us;
    std::vector<std::uint8_t> tx_verifs;
    std::vector<std::uint8_t> end_verifs;
  };
  struct TxJob {
    std::shared_ptr<BlockCtx> ctx;
    TxFifoEntry tx;
    std::vector<EndsFifoEntry> ends;
  };
  struct LaneDone {
    std::shared_ptr<BlockCtx> ctx;
    std::uint32_t tx_num = 0;
    std::uint32_t rdset_size = 0;
    std::uint32_t wrset_size = 0;
  };
  class InFlight;

  void block_verify_loop();
  void lane_loop();
  bool next_job(TxJob& job);
  void collector_loop();
  void mvcc_loop();
  void fail(std::exception_ptr e);
  void close_all();

  FifoSet& fifos_;
  KvStore& store_;
  const PolicyTable& policies_;
  ResultMailbox& results_;
  PipelineConfig config_;
  std::shared_ptr<VerifyEngine> engine_;

  std::unique_ptr<InFlight> in_flight_;
  BoundedQueue<std::shared_ptr<BlockCtx>> verified_{1};
  BoundedQueue<std::shared_ptr<BlockCtx>> ctx_order_;
  BoundedQueue<LaneDone> done_;
  BoundedQueue<LaneDone> committed_;

  std::mutex dispatch_mu_;
  std::shared_ptr<BlockCtx> current_;
  std::uint32_t next_tx_ = 0;

  std::atomic<unsigned> lanes_running_{0};
  std::atomic<std::uint64_t> blocks_{0}, txs_{0};
  std::atomic<std::uint64_t> block_verifs_{0}, tx_verifs_{0}, end_verifs_{0}, unknown_{0};

  std::mutex error_mu_;
  std::exception_ptr error_;
  std::vector<std::thread> threads_;
  bool started_ = false;
};

}  // namespace bmac
