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
#include <vector>

#include "bmac/block.hpp"
#include "bmac/identity.hpp"
#include "bmac/udp.hpp"
#include "bmac/wire_format.hpp"

namespace bmac {

struct Section {
  SectionType type = SectionType::header;
  std::uint16_t index = 0;
  Bytes bytes;
};

/// Header section, one section per transaction, then metadata.
std::vector<Section> split_sections(const Block& block);

struct RemovedIdentities {
  Bytes payload;
  std::vector<LocatorAnnotation> locators;
  /// Identities this call added to the cache; the receiver needs a
  /// cache-sync for each before it can reinsert them.
  std::vector<std::pair<EncodedId, Bytes>> registered;
};

/// Replaces every certificate element in `section` with its 2-byte id.
/// Throws ProtocolError for an unknown certificate when registration is
/// disabled.
RemovedIdentities remove_identities(ByteView section, IdentityCache& cache,
                                    bool allow_registration = true);

/// Pointer annotations for the fields the receiver extracts, in offsets of
/// the unmodified section, sorted by offset.
std::vector<PointerAnnotation> generate_annotations(ByteView section, SectionType type);

struct SenderOptions {
  std::size_t max_frame = kDefaultMaxFrame;
  bool allow_registration = true;
};

struct SendReport {
  std::size_t packets = 0;
  std::size_t section_packets = 0;
  std::size_t cache_sync_packets = 0;
  std::size_t wire_bytes = 0;  // UDP payload bytes
};

/// Turns blocks into self-contained section packets. One sender per
/// destination; not reentrant.
class BmacSender {
 public:
  BmacSender(IdentityCache& cache, SenderOptions options = {});

  /// Cache-sync packets for newly seen identities first, then one packet
  /// per section in section order.
  std::vector<SectionPacket> packetize(const Block& block);
  std::vector<Bytes> encode(const Block& block);

  SendReport send_block(const Block& block, UdpSocket& socket, const Endpoint& dest);

 private:
  IdentityCache& cache_;
  SenderOptions options_;
  // Registered but not yet announced; survives a failed packetize().
  std::vector<std::pair<EncodedId, Bytes>> pending_sync_;
};

}  // namespace bmac
