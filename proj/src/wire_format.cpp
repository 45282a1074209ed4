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

#include "bmac/wire_format.hpp"

#include "bmac/error.hpp"

namespace bmac {

namespace {
constexpr std::uint8_t kPointerKind = 0;
constexpr std::uint8_t kLocatorKind = 1;
constexpr std::uint8_t kMaxFieldKind = static_cast<std::uint8_t>(FieldKind::orderer_signature);
}  // namespace

std::string_view field_kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::block_number: return "block_number";
    case FieldKind::prev_hash: return "prev_hash";
    case FieldKind::data_hash: return "data_hash";
    case FieldKind::creator_id_slot: return "creator_id_slot";
    case FieldKind::client_signature: return "client_signature";
    case FieldKind::cc_id: return "cc_id";
    case FieldKind::read_set: return "read_set";
    case FieldKind::write_set: return "write_set";
    case FieldKind::endorsement_blob: return "endorsement_blob";
    case FieldKind::orderer_signature: return "orderer_signature";
  }
  return "unknown";
}

Bytes encode_packet(const SectionPacket& p) {
  std::size_t annotations = p.locators.size() + p.pointers.size();
  if (annotations > 0xFFFF || p.payload.size() > 0xFFFF) {
    throw FrameLimitError("section does not fit the L7 header fields");
  }
  Bytes out;
  out.reserve(p.wire_size());
  put_u8(out, kMagic0);
  put_u8(out, kMagic1);
  put_u8(out, kWireVersion);
  put_u8(out, static_cast<std::uint8_t>(p.type));
  put_u64(out, p.block_number);
  put_u16(out, p.section_index);
  put_u16(out, p.total_sections);
  put_u16(out, static_cast<std::uint16_t>(annotations));
  put_u16(out, static_cast<std::uint16_t>(p.payload.size()));
  for (const auto& l : p.locators) {
    put_u8(out, kLocatorKind);
    put_u8(out, 0);
    put_u16(out, l.offset);
    put_u16(out, l.id.value());
  }
  for (const auto& ptr : p.pointers) {
    put_u8(out, kPointerKind);
    put_u8(out, static_cast<std::uint8_t>(ptr.field));
    put_u16(out, ptr.offset);
    put_u16(out, ptr.length);
  }
  append(out, p.payload);
  return out;
}

SectionPacket parse_packet(ByteView d) {
  if (d.size() < kFixedHeaderSize) throw DecodeError("short L7 header", d.size());
  if (d[0] != kMagic0 || d[1] != kMagic1) throw ProtocolError("bad magic");
  if (d[2] != kWireVersion) throw ProtocolError("unsupported wire version " + std::to_string(d[2]));
  if (d[3] > static_cast<std::uint8_t>(SectionType::cache_sync)) {
    throw ProtocolError("unknown section type " + std::to_string(d[3]));
  }
  SectionPacket p;
  p.type = static_cast<SectionType>(d[3]);
  p.block_number = get_u64(&d[4]);
  p.section_index = get_u16(&d[12]);
  p.total_sections = get_u16(&d[14]);
  std::size_t annotations = get_u16(&d[16]);
  std::size_t payload_len = get_u16(&d[18]);
  std::size_t need = kFixedHeaderSize + annotations * kAnnotationSize + payload_len;
  if (d.size() < need) throw DecodeError("truncated BMac packet", d.size());
  if (d.size() > need) throw DecodeError("trailing bytes after BMac payload", need);
  std::size_t pos = kFixedHeaderSize;
  for (std::size_t i = 0; i < annotations; ++i, pos += kAnnotationSize) {
    std::uint8_t kind = d[pos];
    std::uint16_t off = get_u16(&d[pos + 2]);
    std::uint16_t val = get_u16(&d[pos + 4]);
    if (kind == kLocatorKind) {
      if (!p.pointers.empty()) throw DecodeError("locator after pointer annotations", pos);
      if (off + 2u > payload_len) throw DecodeError("locator outside payload", pos);
      if (!p.locators.empty() && off < p.locators.back().offset + 2u) {
        throw DecodeError("locators overlap or are out of order", pos);
      }
      p.locators.push_back({off, EncodedId(val)});
    } else if (kind == kPointerKind) {
      if (d[pos + 1] > kMaxFieldKind) throw DecodeError("unknown pointer field kind", pos + 1);
      p.pointers.push_back({static_cast<FieldKind>(d[pos + 1]), off, val});
    } else {
      throw DecodeError("unknown annotation kind", pos);
    }
  }
  p.payload.assign(d.begin() + static_cast<long>(pos), d.end());
  return p;
}

std::vector<SectionPacket> make_cache_sync_packets(
    const std::vector<std::pair<EncodedId, Bytes>>& entries, std::size_t max_frame) {
  std::vector<SectionPacket> out;
  SectionPacket cur;
  cur.type = SectionType::cache_sync;
  for (const auto& [id, cert] : entries) {
    std::size_t rec = 4 + cert.size();
    if (kFixedHeaderSize + rec > max_frame || cert.size() > 0xFFFF) {
      throw FrameLimitError("certificate for id " + std::to_string(id.value()) +
                            " does not fit a cache-sync frame");
    }
    if (cur.wire_size() + rec > max_frame) {
      out.push_back(std::move(cur));
      cur = SectionPacket{};
      cur.type = SectionType::cache_sync;
    }
    put_u16(cur.payload, id.value());
    put_u16(cur.payload, static_cast<std::uint16_t>(cert.size()));
    append(cur.payload, cert);
  }
  if (!cur.payload.empty()) out.push_back(std::move(cur));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].section_index = static_cast<std::uint16_t>(i);
    out[i].total_sections = static_cast<std::uint16_t>(out.size());
  }
  return out;
}

std::vector<std::pair<EncodedId, Bytes>> parse_cache_sync(const SectionPacket& p) {
  std::vector<std::pair<EncodedId, Bytes>> out;
  const Bytes& b = p.payload;
  std::size_t pos = 0;
  while (pos < b.size()) {
    if (b.size() - pos < 4) throw DecodeError("truncated cache-sync record", pos);
    EncodedId id(get_u16(&b[pos]));
    std::size_t len = get_u16(&b[pos + 2]);
    pos += 4;
    if (b.size() - pos < len) throw DecodeError("truncated cache-sync certificate", pos);
    out.emplace_back(id, Bytes(b.begin() + static_cast<long>(pos), b.begin() + static_cast<long>(pos + len)));
    pos += len;
  }
  return out;
}

}  // namespace bmac
