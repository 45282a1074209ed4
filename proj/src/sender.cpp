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

#include "bmac/sender.hpp"

#include <algorithm>

#include "bmac/baseline_codec.hpp"
#include "bmac/error.hpp"

namespace bmac {

namespace {

std::uint16_t narrow16(std::size_t v, const char* what) {
  if (v > 0xFFFF) throw FrameLimitError(std::string(what) + " offset exceeds 16 bits");
  return static_cast<std::uint16_t>(v);
}

PointerAnnotation pointer_to(FieldKind k, const Element& e) {
  return {k, narrow16(e.value_offset, "pointer"), narrow16(e.value.size(), "pointer")};
}

std::string describe(const SectionPacket& p) {
  switch (p.type) {
    case SectionType::transaction:
      return "transaction " + std::to_string(p.section_index - 1) + " of block " +
             std::to_string(p.block_number);
    case SectionType::header: return "header of block " + std::to_string(p.block_number);
    case SectionType::metadata: return "metadata of block " + std::to_string(p.block_number);
    case SectionType::cache_sync: return "cache-sync packet";
  }
  return "section";
}

}  // namespace

std::vector<Section> split_sections(const Block& block) {
  std::vector<Section> out;
  out.reserve(block.transactions.size() + 2);
  out.push_back({SectionType::header, 0, encode_header(block.header)});
  for (const auto& tx : block.transactions) {
    out.push_back({SectionType::transaction, static_cast<std::uint16_t>(out.size()), encode_transaction(tx)});
  }
  out.push_back({SectionType::metadata, static_cast<std::uint16_t>(out.size()), encode_metadata(block.metadata)});
  return out;
}

RemovedIdentities remove_identities(ByteView section, IdentityCache& cache, bool allow_registration) {
  std::vector<Element> certs;
  for_each_element(section, [&](const Element& e) {
    if (e.tag == tag::kCertificate) certs.push_back(e);
  });
  RemovedIdentities out;
  out.payload.reserve(section.size());
  std::size_t copied = 0;
  for (const auto& e : certs) {
    EncodedId id;
    if (auto found = cache.find(e.value)) {
      id = *found;
    } else if (allow_registration) {
      auto reg = cache.register_cert(e.value);
      id = reg.id;
      if (reg.inserted) out.registered.emplace_back(id, Bytes(e.value.begin(), e.value.end()));
    } else {
      throw ProtocolError("unknown identity at section offset " + std::to_string(e.offset) +
                          " and cache registration is disabled");
    }
    out.payload.insert(out.payload.end(), section.begin() + static_cast<long>(copied),
                       section.begin() + static_cast<long>(e.offset));
    out.locators.push_back({narrow16(out.payload.size(), "locator"), id});
    put_u16(out.payload, id.value());
    copied = e.offset + e.size();
  }
  out.payload.insert(out.payload.end(), section.begin() + static_cast<long>(copied), section.end());
  return out;
}

std::vector<PointerAnnotation> generate_annotations(ByteView section, SectionType type) {
  std::vector<PointerAnnotation> out;
  switch (type) {
    case SectionType::header: {
      auto he = read_single(section, tag::kHeader);
      ElementReader rd(he.value, he.value_offset);
      out.push_back(pointer_to(FieldKind::block_number, rd.expect(tag::kNumber)));
      out.push_back(pointer_to(FieldKind::prev_hash, rd.expect(tag::kPrevHash)));
      out.push_back(pointer_to(FieldKind::data_hash, rd.expect(tag::kDataHash)));
      rd.finish();
      break;
    }
    case SectionType::transaction: {
      auto te = read_single(section, tag::kTransaction);
      ElementReader rd(te.value, te.value_offset);
      out.push_back(pointer_to(FieldKind::creator_id_slot, rd.expect(tag::kCertificate)));
      auto payload = rd.expect(tag::kPayload);
      ElementReader pr(payload.value, payload.value_offset);
      pr.expect(tag::kChannelHeader);
      pr.expect(tag::kNonce);
      out.push_back(pointer_to(FieldKind::cc_id, pr.expect(tag::kCcId)));
      pr.expect(tag::kInput);
      out.push_back(pointer_to(FieldKind::read_set, pr.expect(tag::kReadSet)));
      out.push_back(pointer_to(FieldKind::write_set, pr.expect(tag::kWriteSet)));
      auto ends = rd.expect(tag::kEndorsements);
      ElementReader er(ends.value, ends.value_offset);
      while (!er.done()) out.push_back(pointer_to(FieldKind::endorsement_blob, er.expect(tag::kEndorsement)));
      out.push_back(pointer_to(FieldKind::client_signature, rd.expect(tag::kClientSignature)));
      rd.finish();
      break;
    }
    case SectionType::metadata: {
      auto me = read_single(section, tag::kMetadata);
      ElementReader rd(me.value, me.value_offset);
      rd.expect(tag::kCertificate);
      out.push_back(pointer_to(FieldKind::orderer_signature, rd.expect(tag::kOrdererSignature)));
      rd.finish();
      break;
    }
    case SectionType::cache_sync:
      break;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.offset < b.offset; });
  return out;
}

BmacSender::BmacSender(IdentityCache& cache, SenderOptions options)
    : cache_(cache), options_(options) {}

std::vector<SectionPacket> BmacSender::packetize(const Block& block) {
  auto sections = split_sections(block);
  if (sections.size() > 0xFFFF) throw FrameLimitError("too many sections in one block");
  std::vector<SectionPacket> packets;
  packets.reserve(sections.size());
  for (const auto& s : sections) {
    SectionPacket p;
    p.type = s.type;
    p.block_number = block.number();
    p.section_index = s.index;
    p.total_sections = static_cast<std::uint16_t>(sections.size());
    p.pointers = generate_annotations(s.bytes, s.type);
    auto removed = remove_identities(s.bytes, cache_, options_.allow_registration);
    p.locators = std::move(removed.locators);
    p.payload = std::move(removed.payload);
    for (auto& r : removed.registered) pending_sync_.push_back(std::move(r));
    if (p.wire_size() > options_.max_frame) {
      throw FrameLimitError(describe(p) + " needs " + std::to_string(p.wire_size()) +
                            " bytes, frame limit is " + std::to_string(options_.max_frame));
    }
    packets.push_back(std::move(p));
  }
  if (!pending_sync_.empty()) {
    auto sync = make_cache_sync_packets(pending_sync_, options_.max_frame);
    pending_sync_.clear();
    for (auto& s : sync) s.block_number = block.number();
    packets.insert(packets.begin(), std::make_move_iterator(sync.begin()),
                   std::make_move_iterator(sync.end()));
  }
  return packets;
}

std::vector<Bytes> BmacSender::encode(const Block& block) {
  std::vector<Bytes> out;
  for (const auto& p : packetize(block)) out.push_back(encode_packet(p));
  return out;
}

SendReport BmacSender::send_block(const Block& block, UdpSocket& socket, const Endpoint& dest) {
  SendReport report;
  for (const auto& p : packetize(block)) {
    Bytes wire = encode_packet(p);
    socket.send_to(wire, dest);
    ++report.packets;
    if (p.type == SectionType::cache_sync) {
      ++report.cache_sync_packets;
    } else {
      ++report.section_packets;
    }
    report.wire_bytes += wire.size();
  }
  return report;
}

}  // namespace bmac
