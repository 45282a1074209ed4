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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bmac/fifo_entries.hpp"
#include "bmac/identity.hpp"
#include "bmac/sha256.hpp"
#include "bmac/wire_format.hpp"

namespace bmac {

enum class PacketClass { bmac, normal, malformed };

struct Classification {
  PacketClass kind = PacketClass::normal;
  SectionPacket packet;  // valid when kind == bmac
  std::string error;     // set when kind == malformed
};

/// Anything not addressed to the BMac port is normal traffic; on the BMac
/// port the L7 header must parse.
Classification classify_packet(ByteView datagram, std::uint16_t dst_port, std::uint16_t bmac_port);

/// Where a certificate element was reinserted in the reconstructed section.
struct PlacedIdentity {
  EncodedId id;
  std::size_t value_offset = 0;
  std::size_t value_length = 0;
};

/// Inverse of remove_identities. Throws MissingIdentityError for an id the
/// cache does not know, DecodeError if a locator does not point at its id.
Bytes insert_identities(ByteView payload, std::span<const LocatorAnnotation> locators,
                        const IdentityCache& cache, std::vector<PlacedIdentity>* placed = nullptr);

struct HeaderFields {
  std::uint64_t block_number = 0;
  Hash32 prev_hash{};
  Hash32 data_hash{};
};

struct EndorsementFields {
  EncodedId endorser_id;
  VerifyRequest request;
};

struct TxFields {
  std::uint16_t cc_id = 0;
  VerifyRequest client;
  std::vector<EndorsementFields> endorsements;
  std::vector<ReadEntry> reads;
  std::vector<WriteEntry> writes;
};

struct MetadataFields {
  VerifyRequest orderer;  // digest filled in once the block hash completes
};

// Field extraction from a reconstructed section driven by pointer
// annotations. Throw DecodeError on inconsistent pointers.
HeaderFields extract_header(ByteView section, std::span<const PointerAnnotation> pointers);
TxFields extract_transaction(ByteView section, std::span<const PointerAnnotation> pointers,
                             std::span<const PlacedIdentity> placed, const IdentityCache& cache);
MetadataFields extract_metadata(ByteView section, std::span<const PointerAnnotation> pointers,
                                std::span<const PlacedIdentity> placed, const IdentityCache& cache);

/// Streaming block hash over the header and transaction sections. Sections
/// may arrive in any order; bytes are hashed as soon as the prefix before
/// them is complete.
class BlockHashStream {
 public:
  /// index 0 is the header, transaction i is index i + 1.
  void add(std::uint16_t index, ByteView section);
  std::uint16_t hashed() const { return next_; }
  Hash32 finish();

 private:
  Sha256 hash_;
  std::uint16_t next_ = 0;
  std::map<std::uint16_t, Bytes> pending_;
};

struct ReconstructedSection {
  Bytes bytes;
  std::vector<PointerAnnotation> pointers;
};

struct StreamDigests {
  Hash32 block{};
  std::vector<Hash32> txs;
  std::vector<std::vector<Hash32>> endorsements;
};

/// The three hash streams over reconstructed sections, fed in the given
/// order (which need not be section order).
StreamDigests hash_streams(const ReconstructedSection& header,
                           const std::vector<ReconstructedSection>& txs,
                           std::span<const std::size_t> arrival_order = {});

struct ReceiverOptions {
  std::uint16_t bmac_port = kDefaultPort;
  std::chrono::milliseconds reassembly_deadline{250};
};

struct ReceiverCounters {
  std::uint64_t datagrams = 0;
  std::uint64_t bmac_packets = 0;
  std::uint64_t normal_packets = 0;
  std::uint64_t malformed_packets = 0;
  std::uint64_t cache_sync_packets = 0;
  std::uint64_t section_packets = 0;
  std::uint64_t duplicate_sections = 0;
  std::uint64_t stale_packets = 0;
  std::uint64_t completed_blocks = 0;
  std::uint64_t released_blocks = 0;
  std::uint64_t incomplete_blocks = 0;
  std::uint64_t failed_blocks = 0;
};

using BypassSink = std::function<void(ByteView datagram, std::uint16_t dst_port)>;

/// Software protocol processor. Sections are processed as they arrive;
/// a block's FIFO entries are released atomically, in block-number order,
/// once every section is in. Single ingest context: not thread-safe.
class Receiver {
 public:
  Receiver(IdentityCache& cache, FifoSet& fifos, ReceiverOptions options = {},
           BypassSink bypass = nullptr);

  void ingest(ByteView datagram, std::uint16_t dst_port, Clock::time_point now = Clock::now());
  /// Expires overdue blocks and releases whatever became releasable.
  void poll(Clock::time_point now = Clock::now());

  const ReceiverCounters& counters() const { return counters_; }
  std::size_t staged_blocks() const { return staged_.size(); }

 private:
  struct Staged {
    std::uint16_t total = 0;
    std::vector<bool> have;
    std::size_t received = 0;
    Clock::time_point first_seen{};
    BlockHashStream hash;
    std::optional<HeaderFields> header;
    std::vector<std::optional<TxFields>> txs;
    std::optional<MetadataFields> meta;
  };
  struct Ready {
    BlockEntries entries;
    Clock::time_point ready_at{};
  };

  void handle_section(SectionPacket& p, Clock::time_point now);
  BlockEntries finalize(std::uint64_t block_num, Staged& s);
  void fail_block(std::uint64_t block_num);
  void release(Clock::time_point now);

  IdentityCache& cache_;
  FifoSet& fifos_;
  ReceiverOptions options_;
  BypassSink bypass_;
  ReceiverCounters counters_;
  std::map<std::uint64_t, Staged> staged_;
  std::map<std::uint64_t, Ready> ready_;
  std::set<std::uint64_t> dead_;
  std::optional<std::uint64_t> last_released_;
};

}  // namespace bmac
