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

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "bmac/bytes.hpp"
#include "bmac/ecdsa.hpp"

namespace bmac {

/// Key version: the (block, transaction) that last wrote it. (0,0) means
/// "absent" when used as a read-set expectation.
struct Version {
  std::uint64_t block_num = 0;
  std::uint32_t tx_num = 0;

  auto operator<=>(const Version&) const = default;
};

struct ReadEntry {
  std::string key;
  Version version;

  bool operator==(const ReadEntry&) const = default;
};

struct WriteEntry {
  std::string key;
  Bytes value;

  bool operator==(const WriteEntry&) const = default;
};

/// Envelope fields carried alongside every transaction, shaped after the
/// channel header of a marshaled Fabric transaction.
struct ChannelHeader {
  std::uint8_t type = 3;  // ENDORSER_TRANSACTION
  std::uint32_t version = 0;
  std::int64_t timestamp_s = 0;
  std::int32_t timestamp_ns = 0;
  std::string channel_id = "mychannel";
  std::string tx_id;  // 64 hex chars
  std::uint64_t epoch = 0;
  std::string cc_name;
  std::string cc_version = "1.0";
  Bytes tls_cert_hash;  // 32 bytes

  bool operator==(const ChannelHeader&) const = default;
};

/// The part of a transaction endorsers sign over (together with their own
/// certificate).
struct TxPayload {
  ChannelHeader header;
  Bytes nonce;  // 24 bytes
  std::uint16_t cc_id = 0;
  std::vector<std::string> input_args;
  std::vector<ReadEntry> reads;
  std::vector<WriteEntry> writes;
  Bytes proposal_hash;  // 32 bytes
  std::uint32_t response_status = 200;
  std::string response_message;
  Bytes response_payload;
  Bytes events;

  bool operator==(const TxPayload&) const = default;
};

struct Endorsement {
  Bytes endorser_cert;
  Bytes signature;  // DER

  bool operator==(const Endorsement&) const = default;
};

struct Transaction {
  Bytes creator_cert;
  TxPayload payload;
  std::vector<Endorsement> endorsements;
  Bytes client_signature;  // DER

  bool operator==(const Transaction&) const = default;
};

struct BlockHeader {
  std::uint64_t number = 0;
  Hash32 prev_hash{};
  Hash32 data_hash{};

  bool operator==(const BlockHeader&) const = default;
};

struct BlockMetadata {
  Bytes orderer_cert;
  Bytes orderer_signature;  // DER

  bool operator==(const BlockMetadata&) const = default;
};

inline constexpr std::size_t kDefaultMaxBlockTxs = 256;

struct Block {
  BlockHeader header;
  std::vector<Transaction> transactions;
  BlockMetadata metadata;

  std::uint64_t number() const { return header.number; }
  bool operator==(const Block&) const = default;
};

// Canonical signing digests.

/// SHA-256 over the transaction's encoded body up to (excluding) the client
/// signature element: creator, payload and endorsements elements.
Hash32 tx_digest(const Transaction& tx);
/// SHA-256(encoded payload element || endorser certificate bytes).
Hash32 endorsement_digest(const TxPayload& payload, ByteView endorser_cert);
/// SHA-256(header section || transaction sections in order).
Hash32 block_digest(ByteView header_section, const std::vector<Bytes>& tx_sections);
Hash32 block_digest(const Block& block);
/// SHA-256 over the concatenated transaction sections; stored in the header.
Hash32 data_hash(const std::vector<Bytes>& tx_sections);

// Construction helpers.

Endorsement endorse(const TxPayload& payload, const PrivateKey& endorser_key, ByteView endorser_cert);

/// Returns `tx` with its client signature filled in over tx_digest.
Transaction client_sign(Transaction tx, const PrivateKey& client_key);

/// Fills data_hash, signs the block digest and attaches orderer metadata.
/// Throws RangeError for an empty block or more than `max_txs` transactions.
Block build_signed_block(std::uint64_t number, const Hash32& prev_hash, std::vector<Transaction> txs,
                         const PrivateKey& orderer_key, ByteView orderer_cert,
                         std::size_t max_txs = kDefaultMaxBlockTxs);

}  // namespace bmac
