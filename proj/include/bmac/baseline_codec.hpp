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
#include <functional>
#include <vector>

#include "bmac/block.hpp"
#include "bmac/bytes.hpp"

namespace bmac {

/// Baseline nested encoding. Every element is `tag(u8) length(u32 BE) value`;
/// container elements hold further elements. See docs/wire.md.
namespace tag {
inline constexpr std::uint8_t kBlock = 0x01;
inline constexpr std::uint8_t kHeader = 0x10;
inline constexpr std::uint8_t kNumber = 0x11;
inline constexpr std::uint8_t kPrevHash = 0x12;
inline constexpr std::uint8_t kDataHash = 0x13;
inline constexpr std::uint8_t kData = 0x20;
inline constexpr std::uint8_t kTransaction = 0x30;
inline constexpr std::uint8_t kPayload = 0x31;
inline constexpr std::uint8_t kChannelHeader = 0x32;
inline constexpr std::uint8_t kInput = 0x34;
inline constexpr std::uint8_t kReadSet = 0x35;
inline constexpr std::uint8_t kRead = 0x36;
inline constexpr std::uint8_t kWriteSet = 0x37;
inline constexpr std::uint8_t kWrite = 0x38;
inline constexpr std::uint8_t kResponse = 0x39;
inline constexpr std::uint8_t kMetadata = 0x40;
inline constexpr std::uint8_t kOrdererSignature = 0x41;
inline constexpr std::uint8_t kEndorsements = 0x50;
inline constexpr std::uint8_t kEndorsement = 0x51;
inline constexpr std::uint8_t kEndorsementSignature = 0x52;
inline constexpr std::uint8_t kClientSignature = 0x53;
inline constexpr std::uint8_t kTxType = 0x60;
inline constexpr std::uint8_t kHeaderVersion = 0x61;
inline constexpr std::uint8_t kTimestamp = 0x62;
inline constexpr std::uint8_t kChannelId = 0x63;
inline constexpr std::uint8_t kTxId = 0x64;
inline constexpr std::uint8_t kEpoch = 0x65;
inline constexpr std::uint8_t kCcName = 0x66;
inline constexpr std::uint8_t kCcVersion = 0x67;
inline constexpr std::uint8_t kTlsCertHash = 0x68;
inline constexpr std::uint8_t kNonce = 0x69;
inline constexpr std::uint8_t kCcId = 0x6A;
inline constexpr std::uint8_t kArg = 0x6B;
inline constexpr std::uint8_t kKey = 0x6C;
inline constexpr std::uint8_t kVersion = 0x6D;
inline constexpr std::uint8_t kValue = 0x6E;
inline constexpr std::uint8_t kProposalHash = 0x6F;
inline constexpr std::uint8_t kStatus = 0x70;
inline constexpr std::uint8_t kMessage = 0x71;
inline constexpr std::uint8_t kResponsePayload = 0x72;
inline constexpr std::uint8_t kEvents = 0x73;
inline constexpr std::uint8_t kCertificate = 0xC0;
}  // namespace tag

inline constexpr std::size_t kElementHeaderSize = 5;

bool is_container_tag(std::uint8_t t);

/// One decoded element. Offsets are relative to the buffer handed to the
/// reader (plus its base offset).
struct Element {
  std::uint8_t tag = 0;
  std::size_t offset = 0;        // of the tag byte
  std::size_t value_offset = 0;  // of the first value byte
  ByteView value;

  std::size_t size() const { return kElementHeaderSize + value.size(); }
};

/// Sequential reader over a run of sibling elements.
class ElementReader {
 public:
  explicit ElementReader(ByteView data, std::size_t base_offset = 0)
      : data_(data), base_(base_offset) {}

  bool done() const { return pos_ == data_.size(); }
  Element next();
  Element expect(std::uint8_t t);
  /// Throws DecodeError unless every byte has been consumed.
  void finish() const;
  std::size_t offset() const { return base_ + pos_; }

 private:
  ByteView data_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

/// Reads exactly one element spanning all of `data`.
Element read_single(ByteView data, std::uint8_t expected_tag, std::size_t base_offset = 0);

/// Depth-first visit of every element (containers before their children).
void for_each_element(ByteView data, const std::function<void(const Element&)>& visit,
                      std::size_t base_offset = 0);

void put_element(Bytes& out, std::uint8_t t, ByteView value);

Bytes encode_header(const BlockHeader& h);
Bytes encode_payload(const TxPayload& p);
Bytes encode_transaction(const Transaction& tx);
Bytes encode_metadata(const BlockMetadata& m);
Bytes encode_baseline(const Block& block);

BlockHeader decode_header(ByteView section, std::size_t base_offset = 0);
TxPayload decode_payload(ByteView element, std::size_t base_offset = 0);
Transaction decode_transaction(ByteView section, std::size_t base_offset = 0);
BlockMetadata decode_metadata(ByteView section, std::size_t base_offset = 0);
Block decode_baseline(ByteView bytes);

/// Read/write set lists as they appear inside their container values.
std::vector<ReadEntry> decode_read_set(ByteView value, std::size_t base_offset = 0);
std::vector<WriteEntry> decode_write_set(ByteView value, std::size_t base_offset = 0);

/// The byte range of a transaction section covered by tx_digest.
ByteView tx_signed_region(ByteView tx_section);

/// Bytes occupied by certificate elements (header + value) in an encoding.
std::size_t identity_bytes(ByteView encoded);

}  // namespace bmac
