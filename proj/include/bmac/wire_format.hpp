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
#include <string_view>
#include <utility>
#include <vector>

#include "bmac/bytes.hpp"
#include "bmac/identity.hpp"

namespace bmac {

inline constexpr std::uint8_t kMagic0 = 0xB1;
inline constexpr std::uint8_t kMagic1 = 0x0C;
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kFixedHeaderSize = 20;
inline constexpr std::size_t kAnnotationSize = 6;
inline constexpr std::size_t kDefaultMaxFrame = 8192;
inline constexpr std::uint16_t kDefaultPort = 5000;

enum class SectionType : std::uint8_t { header = 0, transaction = 1, metadata = 2, cache_sync = 3 };

enum class FieldKind : std::uint8_t {
  block_number = 0,
  prev_hash = 1,
  data_hash = 2,
  creator_id_slot = 3,
  client_signature = 4,
  cc_id = 5,
  read_set = 6,
  write_set = 7,
  endorsement_blob = 8,
  orderer_signature = 9,
};

std::string_view field_kind_name(FieldKind k);

/// Offset/length of a field inside the reconstructed (identity-reinserted)
/// section.
struct PointerAnnotation {
  FieldKind field = FieldKind::block_number;
  std::uint16_t offset = 0;
  std::uint16_t length = 0;

  bool operator==(const PointerAnnotation&) const = default;
};

/// Offset in the wire payload where a 2-byte encoded id stands in for a
/// removed certificate element.
struct LocatorAnnotation {
  std::uint16_t offset = 0;
  EncodedId id;

  bool operator==(const LocatorAnnotation&) const = default;
};

struct SectionPacket {
  SectionType type = SectionType::header;
  std::uint64_t block_number = 0;
  std::uint16_t section_index = 0;
  std::uint16_t total_sections = 0;
  std::vector<LocatorAnnotation> locators;  // ascending offset
  std::vector<PointerAnnotation> pointers;  // ascending offset
  Bytes payload;

  std::size_t wire_size() const {
    return kFixedHeaderSize + kAnnotationSize * (locators.size() + pointers.size()) + payload.size();
  }
  bool operator==(const SectionPacket&) const = default;
};

/// Serializes the L7 header, annotations (locators first) and payload.
Bytes encode_packet(const SectionPacket& p);

/// Parses a datagram that claims to be a BMac packet. Throws ProtocolError
/// on bad magic/version/type or DecodeError on truncation or bad offsets.
SectionPacket parse_packet(ByteView datagram);

/// Cache-sync payload: repeated (id u16, length u16, certificate bytes).
std::vector<SectionPacket> make_cache_sync_packets(
    const std::vector<std::pair<EncodedId, Bytes>>& entries, std::size_t max_frame);
std::vector<std::pair<EncodedId, Bytes>> parse_cache_sync(const SectionPacket& p);

}  // namespace bmac
