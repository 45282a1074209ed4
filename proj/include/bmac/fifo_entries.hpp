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
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bmac/block.hpp"
#include "bmac/bounded_queue.hpp"
#include "bmac/ecdsa.hpp"
#include "bmac/identity.hpp"

namespace bmac {

using Clock = std::chrono::steady_clock;

/// Input tuple of a verification engine: {signature, key, data hash}. A
/// request whose signature failed DER decoding is pre-failed and verifies
/// as false.
struct VerifyRequest {
  RawSignature sig;
  std::shared_ptr<const PublicKey> key;
  Hash32 digest{};
  bool pre_failed = false;

  bool operator==(const VerifyRequest& o) const;
};

/// Signature bytes that failed strict DER decoding become a pre-failed
/// request rather than an error.
VerifyRequest make_request(ByteView der_sig, std::shared_ptr<const PublicKey> key, const Hash32& digest);

struct BlockFifoEntry {
  std::uint64_t block_num = 0;
  std::uint32_t num_txs = 0;
  VerifyRequest orderer;
  Clock::time_point emitted_at{};  // not part of equality

  bool operator==(const BlockFifoEntry& o) const {
    return block_num == o.block_num && num_txs == o.num_txs && orderer == o.orderer;
  }
};

struct TxFifoEntry {
  std::uint64_t block_num = 0;
  std::uint32_t tx_num = 0;
  std::uint16_t cc_id = 0;
  std::uint32_t num_ends = 0;
  std::uint32_t rdset_size = 0;
  std::uint32_t wrset_size = 0;
  VerifyRequest client;

  bool operator==(const TxFifoEntry&) const = default;
};

struct EndsFifoEntry {
  std::uint64_t block_num = 0;
  std::uint32_t tx_num = 0;
  EncodedId endorser_id;
  VerifyRequest request;

  bool operator==(const EndsFifoEntry&) const = default;
};

struct RdsetFifoEntry {
  std::uint64_t block_num = 0;
  std::uint32_t tx_num = 0;
  std::string key;
  Version version;

  bool operator==(const RdsetFifoEntry&) const = default;
};

struct WrsetFifoEntry {
  std::uint64_t block_num = 0;
  std::uint32_t tx_num = 0;
  std::string key;
  Bytes value;

  bool operator==(const WrsetFifoEntry&) const = default;
};

/// Everything one block contributes to the five FIFOs, in FIFO order.
struct BlockEntries {
  BlockFifoEntry block;
  std::vector<TxFifoEntry> txs;
  std::vector<EndsFifoEntry> ends;
  std::vector<RdsetFifoEntry> reads;
  std::vector<WrsetFifoEntry> writes;

  bool operator==(const BlockEntries&) const = default;
};

inline constexpr std::size_t kDefaultFifoCapacity = 1 << 16;

/// The buffers between the protocol receiver and the block processor.
struct FifoSet {
  explicit FifoSet(std::size_t capacity = kDefaultFifoCapacity)
      : block(capacity), tx(capacity), ends(capacity), rdset(capacity), wrset(capacity) {}

  BoundedQueue<BlockFifoEntry> block;
  BoundedQueue<TxFifoEntry> tx;
  BoundedQueue<EndsFifoEntry> ends;
  BoundedQueue<RdsetFifoEntry> rdset;
  BoundedQueue<WrsetFifoEntry> wrset;

  void close() {
    block.close();
    tx.close();
    ends.close();
    rdset.close();
    wrset.close();
  }
};

/// Pushes one block's entries. The block entry goes first, then each
/// transaction's entries interleaved in transaction order so a bounded FIFO
/// set never needs a later transaction's data to drain an earlier one.
/// Returns false if the FIFOs were closed.
bool emit(const BlockEntries& entries, FifoSet& fifos);

/// Drains everything currently queued, grouped per block. Test helper for
/// comparing FIFO contents.
std::vector<BlockEntries> drain(FifoSet& fifos);

/// Computes FIFO contents straight from an in-memory block.
/// Throws MissingIdentityError for a certificate absent from `cache`.
BlockEntries reference_entries(const Block& block, const IdentityCache& cache);

}  // namespace bmac
