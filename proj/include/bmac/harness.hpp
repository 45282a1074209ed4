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
#include <memory>
#include <string>
#include <vector>

#include "bmac/config.hpp"
#include "bmac/oracle.hpp"
#include "bmac/pipeline.hpp"
#include "bmac/receiver.hpp"
#include "bmac/results.hpp"
#include "bmac/sender.hpp"

namespace bmac {

struct OracleRun {
  std::vector<OracleResult> results;
  KvStore::Snapshot state;
  OracleCounts totals;
};

OracleRun run_oracle(const Network& net, const std::vector<Block>& blocks, VerdictTable* record = nullptr);

/// Wire datagrams for a block stream (cache-sync packets included) from a
/// fresh sender cache.
struct EncodedStream {
  std::vector<Bytes> datagrams;
  std::size_t baseline_bytes = 0;
  std::size_t wire_bytes = 0;
  std::size_t identity_bytes = 0;
};
EncodedStream encode_stream(const Network& net, const std::vector<Block>& blocks);

struct ValidatorRun {
  std::vector<ValidationResult> results;
  KvStore::Snapshot state;
  PipelineCounters pipeline;
  ReceiverCounters receiver;
};

struct InProcessOptions {
  PipelineConfig pipeline;
  std::shared_ptr<VerifyEngine> engine;
  std::size_t mailbox_depth = 1;
  std::size_t fifo_capacity = 1 << 16;
};

/// Receiver and pipeline in this process; datagrams are delivered in the
/// given order to the BMac port.
ValidatorRun run_in_process(const Network& net, const std::vector<Bytes>& datagrams, const InProcessOptions& options);

/// Pipeline over FIFOs filled up front (no receiver in the timed region).
ValidatorRun run_prefilled(const Network& net, const std::vector<BlockEntries>& entries,
                           const InProcessOptions& options);

struct Mismatch {
  std::uint64_t block = 0;
  std::int64_t tx = -1;  // -1: block-level
  std::string what;
};

std::vector<Mismatch> compare_results(const std::vector<OracleResult>& expected,
                                      const std::vector<ValidationResult>& actual);
std::vector<Mismatch> compare_states(const KvStore::Snapshot& expected, const KvStore::Snapshot& actual);
std::string describe(const Mismatch& m);

struct RunMetrics {
  std::uint64_t blocks = 0;
  std::uint64_t txs = 0;
  std::uint64_t valid_txs = 0;
  double seconds = 0;          // first validation start to last publication
  double throughput_tps = 0;   // committed (processed) transactions per second
  double latency_p50_ms = 0;
  double latency_p99_ms = 0;
  double latency_mean_ms = 0;
  std::uint64_t block_verifications = 0;
  std::uint64_t tx_verifications = 0;
  std::uint64_t endorsement_verifications = 0;
};

RunMetrics summarize(const std::vector<ValidationResult>& results);
std::string csv_header();
std::string csv_row(const std::string& label, const RunMetrics& m);

}  // namespace bmac
