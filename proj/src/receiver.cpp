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

#include "bmac/receiver.hpp"

#include <algorithm>

#include "bmac/baseline_codec.hpp"
#include "bmac/error.hpp"

namespace bmac {

Classification classify_packet(ByteView datagram, std::uint16_t dst_port, std::uint16_t bmac_port) {
  Classification c;
  if (dst_port != bmac_port) return c;
  try {
    c.packet = parse_packet(datagram);
    c.kind = PacketClass::bmac;
  } catch (const Error& e) {
    c.kind = PacketClass::malformed;
    c.error = e.what();
  }
  return c;
}

Bytes insert_identities(ByteView payload, std::span<const LocatorAnnotation> locators,
                        const IdentityCache& cache, std::vector<PlacedIdentity>* placed) {
  Bytes out;
  out.reserve(payload.size() + locators.size() * (kDefaultCertSize + kElementHeaderSize));
  std::size_t copied = 0;
  for (const auto& loc : locators) {
    if (loc.offset < copied || loc.offset + 2u > payload.size()) {
      throw DecodeError("locator outside payload", loc.offset);
    }
    if (get_u16(&payload[loc.offset]) != loc.id.value()) {
      throw DecodeError("locator does not match id in payload", loc.offset);
    }
    auto entry = cache.lookup(loc.id);
    if (!entry) throw MissingIdentityError(loc.id.value());
    out.insert(out.end(), payload.begin() + static_cast<long>(copied),
               payload.begin() + static_cast<long>(loc.offset));
    std::size_t value_at = out.size() + kElementHeaderSize;
    put_element(out, tag::kCertificate, *entry->cert);
    if (placed) placed->push_back({loc.id, value_at, entry->cert->size()});
    copied = loc.offset + 2u;
  }
  out.insert(out.end(), payload.begin() + static_cast<long>(copied), payload.end());
  return out;
}

namespace {

ByteView field(ByteView section, const PointerAnnotation& p) {
  if (std::size_t{p.offset} + p.length > section.size()) {
    throw DecodeError(std::string("pointer ") + std::string(field_kind_name(p.field)) +
                          " outside section",
                      p.offset);
  }
  return section.subspan(p.offset, p.length);
}

const PointerAnnotation& only(std::span<const PointerAnnotation> ptrs, FieldKind k) {
  const PointerAnnotation* hit = nullptr;
  for (const auto& p : ptrs) {
    if (p.field != k) continue;
    if (hit) throw DecodeError("duplicate pointer " + std::string(field_kind_name(k)), p.offset);
    hit = &p;
  }
  if (!hit) throw DecodeError("missing pointer " + std::string(field_kind_name(k)), 0);
  return *hit;
}

Hash32 hash_field(ByteView section, const PointerAnnotation& p) {
  auto v = field(section, p);
  if (v.size() != 32) throw DecodeError("hash field must be 32 bytes", p.offset);
  Hash32 h{};
  std::copy(v.begin(), v.end(), h.begin());
  return h;
}

std::shared_ptr<const PublicKey> key_at(ByteView section, std::size_t value_offset, std::size_t length,
                                        std::span<const PlacedIdentity> placed,
                                        const IdentityCache& cache, EncodedId* id_out) {
  for (const auto& p : placed) {
    if (p.value_offset == value_offset) {
      auto entry = cache.lookup(p.id);
      if (!entry) throw MissingIdentityError(p.id.value());
      if (id_out) *id_out = p.id;
      return entry->key;
    }
  }
  // Certificate sent inline: identify it by content.
  auto cert = section.subspan(value_offset, length);
  auto id = cache.find(cert);
  if (!id) throw MissingIdentityError(0xFFFF);
  if (id_out) *id_out = *id;
  return cache.lookup(*id)->key;
}

// Tx digest region: everything in the transaction value before the client
// signature element.
ByteView tx_region(ByteView section, const PointerAnnotation& sig) {
  if (sig.offset < 2 * kElementHeaderSize) throw DecodeError("client signature pointer too early", sig.offset);
  return section.subspan(kElementHeaderSize, sig.offset - 2 * kElementHeaderSize);
}

// The payload element follows the creator certificate element directly.
ByteView payload_element(ByteView section, const PointerAnnotation& creator) {
  std::size_t at = std::size_t{creator.offset} + creator.length;
  ElementReader rd(section.subspan(std::min(at, section.size())), at);
  auto e = rd.expect(tag::kPayload);
  return section.subspan(at, e.size());
}

}  // namespace

HeaderFields extract_header(ByteView section, std::span<const PointerAnnotation> ptrs) {
  HeaderFields h;
  auto num = field(section, only(ptrs, FieldKind::block_number));
  if (num.size() != 8) throw DecodeError("block number must be 8 bytes", 0);
  h.block_number = get_u64(num.data());
  h.prev_hash = hash_field(section, only(ptrs, FieldKind::prev_hash));
  h.data_hash = hash_field(section, only(ptrs, FieldKind::data_hash));
  return h;
}

TxFields extract_transaction(ByteView section, std::span<const PointerAnnotation> ptrs,
                             std::span<const PlacedIdentity> placed, const IdentityCache& cache) {
  TxFields t;
  const auto& creator = only(ptrs, FieldKind::creator_id_slot);
  field(section, creator);
  auto client_key = key_at(section, creator.offset, creator.length, placed, cache, nullptr);

  const auto& sig = only(ptrs, FieldKind::client_signature);
  t.client = make_request(field(section, sig), client_key, Sha256::digest(tx_region(section, sig)));

  auto cc = field(section, only(ptrs, FieldKind::cc_id));
  if (cc.size() != 2) throw DecodeError("cc_id must be 2 bytes", 0);
  t.cc_id = get_u16(cc.data());

  const auto& rs = only(ptrs, FieldKind::read_set);
  t.reads = decode_read_set(field(section, rs), rs.offset);
  const auto& ws = only(ptrs, FieldKind::write_set);
  t.writes = decode_write_set(field(section, ws), ws.offset);

  Sha256 payload_hash;
  payload_hash.update(payload_element(section, creator));
  for (const auto& p : ptrs) {
    if (p.field != FieldKind::endorsement_blob) continue;
    ElementReader rd(field(section, p), p.offset);
    auto cert = rd.expect(tag::kCertificate);
    auto esig = rd.expect(tag::kEndorsementSignature);
    rd.finish();
    EndorsementFields e;
    auto key = key_at(section, cert.value_offset, cert.value.size(), placed, cache, &e.endorser_id);
    Hash32 digest = Sha256(payload_hash).update(cert.value).finish();
    e.request = make_request(esig.value, std::move(key), digest);
    t.endorsements.push_back(std::move(e));
  }
  return t;
}

MetadataFields extract_metadata(ByteView section, std::span<const PointerAnnotation> ptrs,
                                std::span<const PlacedIdentity> placed, const IdentityCache& cache) {
  auto me = read_single(section, tag::kMetadata);
  ElementReader rd(me.value, me.value_offset);
  auto cert = rd.expect(tag::kCertificate);
  MetadataFields m;
  auto key = key_at(section, cert.value_offset, cert.value.size(), placed, cache, nullptr);
  m.orderer = make_request(field(section, only(ptrs, FieldKind::orderer_signature)), std::move(key), Hash32{});
  return m;
}

void BlockHashStream::add(std::uint16_t index, ByteView section) {
  if (index < next_ || pending_.contains(index)) return;
  if (index != next_) {
    pending_.emplace(index, Bytes(section.begin(), section.end()));
    return;
  }
  hash_.update(section);
  ++next_;
  for (auto it = pending_.begin(); it != pending_.end() && it->first == next_; it = pending_.erase(it)) {
    hash_.update(it->second);
    ++next_;
  }
}

Hash32 BlockHashStream::finish() {
  if (!pending_.empty()) throw ProtocolError("block hash finished with a gap in the section stream");
  return hash_.finish();
}

StreamDigests hash_streams(const ReconstructedSection& header, const std::vector<ReconstructedSection>& txs,
                           std::span<const std::size_t> arrival_order) {
  std::vector<std::size_t> order(arrival_order.begin(), arrival_order.end());
  if (order.empty()) {
    for (std::size_t i = 0; i <= txs.size(); ++i) order.push_back(i);
  }
  StreamDigests out;
  out.txs.resize(txs.size());
  out.endorsements.resize(txs.size());
  BlockHashStream block;
  for (std::size_t idx : order) {
    if (idx == 0) {
      block.add(0, header.bytes);
      continue;
    }
    const auto& s = txs.at(idx - 1);
    block.add(static_cast<std::uint16_t>(idx), s.bytes);
    const auto& sig = only(s.pointers, FieldKind::client_signature);
    out.txs[idx - 1] = Sha256::digest(tx_region(s.bytes, sig));
    Sha256 payload_hash;
    payload_hash.update(payload_element(s.bytes, only(s.pointers, FieldKind::creator_id_slot)));
    for (const auto& p : s.pointers) {
      if (p.field != FieldKind::endorsement_blob) continue;
      ElementReader rd(field(s.bytes, p), p.offset);
      auto cert = rd.expect(tag::kCertificate);
      out.endorsements[idx - 1].push_back(Sha256(payload_hash).update(cert.value).finish());
    }
  }
  out.block = block.finish();
  return out;
}

Receiver::Receiver(IdentityCache& cache, FifoSet& fifos, ReceiverOptions options, BypassSink bypass)
    : cache_(cache), fifos_(fifos), options_(options), bypass_(std::move(bypass)) {}

void Receiver::ingest(ByteView datagram, std::uint16_t dst_port, Clock::time_point now) {
  ++counters_.datagrams;
  auto c = classify_packet(datagram, dst_port, options_.bmac_port);
  switch (c.kind) {
    case PacketClass::normal:
      ++counters_.normal_packets;
      if (bypass_) bypass_(datagram, dst_port);
      return;
    case PacketClass::malformed:
      ++counters_.malformed_packets;
      return;
    case PacketClass::bmac:
      break;
  }
  ++counters_.bmac_packets;
  if (c.packet.type == SectionType::cache_sync) {
    ++counters_.cache_sync_packets;
    try {
      for (const auto& [id, cert] : parse_cache_sync(c.packet)) cache_.install(id, cert);
    } catch (const Error&) {
      ++counters_.malformed_packets;
    }
    return;
  }
  handle_section(c.packet, now);
  release(now);
}

void Receiver::handle_section(SectionPacket& p, Clock::time_point now) {
  ++counters_.section_packets;
  const std::uint64_t b = p.block_number;
  bool type_ok = p.total_sections >= 3 && p.section_index < p.total_sections &&
                 ((p.section_index == 0) == (p.type == SectionType::header)) &&
                 ((p.section_index + 1u == p.total_sections) == (p.type == SectionType::metadata));
  if (!type_ok) {
    ++counters_.malformed_packets;
    return;
  }
  if ((last_released_ && b <= *last_released_) || dead_.contains(b) || ready_.contains(b)) {
    ++counters_.stale_packets;
    return;
  }
  auto [it, fresh] = staged_.try_emplace(b);
  Staged& s = it->second;
  if (fresh) {
    s.total = p.total_sections;
    s.have.assign(p.total_sections, false);
    s.first_seen = now;
    s.txs.resize(p.total_sections - 2u);
  } else if (s.total != p.total_sections) {
    ++counters_.malformed_packets;
    return;
  }
  if (s.have[p.section_index]) {
    ++counters_.duplicate_sections;
    return;
  }
  try {
    std::vector<PlacedIdentity> placed;
    Bytes section = insert_identities(p.payload, p.locators, cache_, &placed);
    switch (p.type) {
      case SectionType::header: {
        s.header = extract_header(section, p.pointers);
        if (s.header->block_number != b) throw DecodeError("header block number differs from L7 header", 0);
        s.hash.add(0, section);
        break;
      }
      case SectionType::transaction:
        s.txs[p.section_index - 1u] = extract_transaction(section, p.pointers, placed, cache_);
        s.hash.add(p.section_index, section);
        break;
      case SectionType::metadata:
        s.meta = extract_metadata(section, p.pointers, placed, cache_);
        break;
      case SectionType::cache_sync:
        break;
    }
  } catch (const MissingIdentityError&) {
    fail_block(b);
    return;
  } catch (const Error&) {
    ++counters_.malformed_packets;
    fail_block(b);
    return;
  }
  s.have[p.section_index] = true;
  if (++s.received == s.total) {
    ++counters_.completed_blocks;
    ready_[b] = Ready{finalize(b, s), now};
    staged_.erase(b);
  }
}

BlockEntries Receiver::finalize(std::uint64_t block_num, Staged& s) {
  BlockEntries e;
  e.block.block_num = block_num;
  e.block.num_txs = static_cast<std::uint32_t>(s.txs.size());
  e.block.orderer = s.meta->orderer;
  e.block.orderer.digest = s.hash.finish();
  for (std::uint32_t t = 0; t < s.txs.size(); ++t) {
    auto& tx = *s.txs[t];
    TxFifoEntry te;
    te.block_num = block_num;
    te.tx_num = t;
    te.cc_id = tx.cc_id;
    te.num_ends = static_cast<std::uint32_t>(tx.endorsements.size());
    te.rdset_size = static_cast<std::uint32_t>(tx.reads.size());
    te.wrset_size = static_cast<std::uint32_t>(tx.writes.size());
    te.client = std::move(tx.client);
    e.txs.push_back(std::move(te));
    for (auto& en : tx.endorsements) e.ends.push_back({block_num, t, en.endorser_id, std::move(en.request)});
    for (auto& r : tx.reads) e.reads.push_back({block_num, t, std::move(r.key), r.version});
    for (auto& w : tx.writes) e.writes.push_back({block_num, t, std::move(w.key), std::move(w.value)});
  }
  return e;
}

void Receiver::fail_block(std::uint64_t block_num) {
  ++counters_.failed_blocks;
  staged_.erase(block_num);
  dead_.insert(block_num);
}

void Receiver::poll(Clock::time_point now) {
  for (auto it = staged_.begin(); it != staged_.end();) {
    if (now - it->second.first_seen >= options_.reassembly_deadline) {
      ++counters_.incomplete_blocks;
      dead_.insert(it->first);
      it = staged_.erase(it);
    } else {
      ++it;
    }
  }
  release(now);
}

void Receiver::release(Clock::time_point now) {
  while (!ready_.empty()) {
    auto it = ready_.begin();
    const std::uint64_t b = it->first;
    if (!staged_.empty() && staged_.begin()->first < b) break;
    if (last_released_ && b != *last_released_ + 1) {
      bool gap_dead = true;
      for (std::uint64_t g = *last_released_ + 1; g < b && gap_dead; ++g) gap_dead = dead_.contains(g);
      if (!gap_dead && now - it->second.ready_at < options_.reassembly_deadline) break;
    }
    it->second.entries.block.emitted_at = Clock::now();
    emit(it->second.entries, fifos_);
    ++counters_.released_blocks;
    last_released_ = b;
    ready_.erase(it);
    dead_.erase(dead_.begin(), dead_.upper_bound(b));
  }
}

}  // namespace bmac
