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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "bmac/baseline_codec.hpp"
#include "bmac/error.hpp"
#include "bmac/receiver.hpp"
#include "bmac/sender.hpp"
#include "support.hpp"

using namespace bmac;
using namespace std::chrono_literals;

namespace {

const Network& net() { return test::four_org_network(); }

std::vector<Block> blocks(std::size_t n, std::size_t txs = 6, std::size_t ends = 3) {
  return test::honest_blocks(net(), test::kThreeOfFour, n, txs, ends, 21);
}

struct Rx {
  std::unique_ptr<IdentityCache> cache = net().make_cache(false);
  FifoSet fifos;
  std::vector<std::uint16_t> bypassed;
  Receiver rx{*cache, fifos, {}, [this](ByteView, std::uint16_t port) { bypassed.push_back(port); }};

  void feed(const std::vector<Bytes>& dgrams, Clock::time_point now = Clock::now()) {
    for (const auto& d : dgrams) rx.ingest(d, kDefaultPort, now);
  }
};

std::vector<BlockEntries> reference(const std::vector<Block>& bs) {
  auto cache = net().make_cache(true);
  std::vector<BlockEntries> out;
  for (const auto& b : bs) out.push_back(reference_entries(b, *cache));
  return out;
}

}  // namespace

TEST(Packet, EncodeParseRoundTrip) {
  SectionPacket p;
  p.type = SectionType::transaction;
  p.block_number = 0x0102030405060708ULL;
  p.section_index = 3;
  p.total_sections = 9;
  p.locators = {{4, EncodedId(0x0120)}, {40, EncodedId(0x0221)}};
  p.pointers = {{FieldKind::cc_id, 10, 2}, {FieldKind::read_set, 20, 7}};
  p.payload = Bytes(64, 0xAB);
  p.payload[4] = 0x01;
  p.payload[5] = 0x20;
  p.payload[40] = 0x02;
  p.payload[41] = 0x21;
  auto bytes = encode_packet(p);
  EXPECT_EQ(bytes.size(), p.wire_size());
  EXPECT_EQ(parse_packet(bytes), p);
}

TEST(Packet, RejectsForeignAndTruncated) {
  auto bytes = encode_packet(SectionPacket{SectionType::header, 1, 0, 3, {}, {}, Bytes(8, 1)});
  auto bad = bytes;
  bad[0] ^= 0xFF;
  EXPECT_THROW(parse_packet(bad), ProtocolError);
  EXPECT_THROW(parse_packet(ByteView(bytes).first(kFixedHeaderSize - 1)), DecodeError);
  EXPECT_THROW(parse_packet(ByteView(bytes).first(bytes.size() - 1)), DecodeError);
}

TEST(Packet, Classification) {
  auto bytes = encode_packet(SectionPacket{SectionType::header, 1, 0, 3, {}, {}, Bytes(8, 1)});
  EXPECT_EQ(classify_packet(bytes, 5001, 5000).kind, PacketClass::normal);
  EXPECT_EQ(classify_packet(bytes, 5000, 5000).kind, PacketClass::bmac);
  Bytes junk{1, 2, 3};
  EXPECT_EQ(classify_packet(junk, 5000, 5000).kind, PacketClass::malformed);
}

TEST(Packet, CacheSyncRoundTrip) {
  std::vector<std::pair<EncodedId, Bytes>> entries;
  for (const auto& id : net().identities()) entries.emplace_back(id.id, id.cert);
  auto packets = make_cache_sync_packets(entries, kDefaultMaxFrame);
  std::vector<std::pair<EncodedId, Bytes>> back;
  for (const auto& p : packets) {
    EXPECT_LE(p.wire_size(), kDefaultMaxFrame);
    for (auto& e : parse_cache_sync(p)) back.push_back(std::move(e));
  }
  EXPECT_EQ(back, entries);
}

TEST(Sender, IdentityRemovalIsReversible) {
  auto b = blocks(1).front();
  auto cache = net().make_cache(false);
  std::set<Bytes> certs{b.metadata.orderer_cert};
  for (const auto& tx : b.transactions) {
    certs.insert(tx.creator_cert);
    for (const auto& e : tx.endorsements) certs.insert(e.endorser_cert);
  }
  for (const auto& s : split_sections(b)) {
    auto removed = remove_identities(s.bytes, *cache);
    if (s.type != SectionType::header) {
      EXPECT_LT(removed.payload.size(), s.bytes.size());
    }
    EXPECT_EQ(insert_identities(removed.payload, removed.locators, *cache), s.bytes);
  }
  EXPECT_EQ(cache->size(), certs.size());
}

TEST(Sender, UnknownIdentityWithoutRegistration) {
  auto b = blocks(1).front();
  auto cache = net().make_cache(false);
  EXPECT_THROW(remove_identities(split_sections(b)[1].bytes, *cache, false), ProtocolError);
}

TEST(Sender, PacketsFitFrameAndSyncComesFirst) {
  auto bs = blocks(2, 40, 4);
  auto cache = net().make_cache(false);
  BmacSender sender(*cache);
  auto first = sender.packetize(bs[0]);
  ASSERT_FALSE(first.empty());
  EXPECT_EQ(first.front().type, SectionType::cache_sync);
  std::size_t sections = 0;
  for (const auto& p : first) {
    EXPECT_LE(p.wire_size(), kDefaultMaxFrame);
    if (p.type != SectionType::cache_sync) {
      EXPECT_EQ(p.section_index, sections++);
      EXPECT_EQ(p.total_sections, bs[0].transactions.size() + 2);
    }
  }
  EXPECT_EQ(sections, bs[0].transactions.size() + 2);
  auto second = sender.packetize(bs[1]);
  EXPECT_TRUE(std::none_of(second.begin(), second.end(),
                           [](const auto& p) { return p.type == SectionType::cache_sync; }));
}

TEST(Sender, PointersLocateFieldsInReconstructedSection) {
  auto b = blocks(1).front();
  auto sections = split_sections(b);
  auto ptrs = generate_annotations(sections[0].bytes, SectionType::header);
  auto h = extract_header(sections[0].bytes, ptrs);
  EXPECT_EQ(h.block_number, b.number());
  EXPECT_EQ(h.prev_hash, b.header.prev_hash);
  EXPECT_EQ(h.data_hash, b.header.data_hash);
  for (std::size_t i = 0; i + 1 < ptrs.size(); ++i) EXPECT_LT(ptrs[i].offset, ptrs[i + 1].offset);
}

TEST(HashStreams, MatchCanonicalDigests) {
  auto b = blocks(1, 9, 3).front();
  auto sections = split_sections(b);
  ReconstructedSection header{sections[0].bytes, generate_annotations(sections[0].bytes, SectionType::header)};
  std::vector<ReconstructedSection> txs;
  for (std::size_t i = 1; i + 1 < sections.size(); ++i) {
    txs.push_back({sections[i].bytes, generate_annotations(sections[i].bytes, SectionType::transaction)});
  }
  // Section indices, header = 0, arriving back to front.
  std::vector<std::size_t> order(txs.size() + 1);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
  auto d = hash_streams(header, txs, order);
  EXPECT_EQ(d.block, block_digest(b));
  ASSERT_EQ(d.txs.size(), b.transactions.size());
  for (std::size_t t = 0; t < d.txs.size(); ++t) {
    const auto& tx = b.transactions[t];
    EXPECT_EQ(d.txs[t], tx_digest(tx));
    ASSERT_EQ(d.endorsements[t].size(), tx.endorsements.size());
    for (std::size_t e = 0; e < tx.endorsements.size(); ++e) {
      EXPECT_EQ(d.endorsements[t][e], endorsement_digest(tx.payload, tx.endorsements[e].endorser_cert));
    }
  }
}

TEST(HashStreams, OutOfOrderSectionsHashInOrder) {
  auto b = blocks(1, 5).front();
  auto sections = split_sections(b);
  BlockHashStream s;
  for (std::size_t i = sections.size() - 1; i-- > 0;) s.add(static_cast<std::uint16_t>(i), sections[i].bytes);
  EXPECT_EQ(s.finish(), block_digest(b));
}

TEST(Receiver, ShuffledDeliveryMatchesReferenceEntries) {
  auto bs = blocks(4);
  auto stream = encode_stream(net(), bs);
  std::mt19937 rng(5);
  // Shuffle within each block, keeping cache-sync ahead of the sections
  // that need it.
  std::vector<Bytes> sync, rest;
  for (auto& d : stream.datagrams) {
    (parse_packet(d).type == SectionType::cache_sync ? sync : rest).push_back(d);
  }
  std::vector<Bytes> order = sync;
  std::size_t at = 0;
  for (const auto& b : bs) {
    std::size_t n = b.transactions.size() + 2;
    std::vector<Bytes> chunk(rest.begin() + at, rest.begin() + at + n);
    std::shuffle(chunk.begin(), chunk.end(), rng);
    order.insert(order.end(), chunk.begin(), chunk.end());
    at += n;
  }
  Rx r;
  r.feed(order);
  EXPECT_EQ(r.rx.counters().released_blocks, bs.size());
  EXPECT_EQ(drain(r.fifos), reference(bs));
}

TEST(Receiver, DuplicatesAndStalePacketsIgnored) {
  auto bs = blocks(2);
  auto stream = encode_stream(net(), bs);
  Rx r;
  r.feed(stream.datagrams);
  r.feed(stream.datagrams);
  const auto& c = r.rx.counters();
  EXPECT_EQ(c.released_blocks, 2u);
  EXPECT_GT(c.stale_packets, 0u);
  EXPECT_EQ(drain(r.fifos), reference(bs));
}

TEST(Receiver, DroppedSectionExpiresAndLaterBlocksFlow) {
  auto bs = blocks(3);
  auto stream = encode_stream(net(), bs);
  std::vector<Bytes> kept;
  bool dropped = false;
  for (auto& d : stream.datagrams) {
    auto p = parse_packet(d);
    if (!dropped && p.type == SectionType::transaction && p.block_number == bs[1].number()) {
      dropped = true;
      continue;
    }
    kept.push_back(d);
  }
  Rx r;
  auto t0 = Clock::now();
  r.feed(kept, t0);
  EXPECT_EQ(r.rx.counters().released_blocks, 1u);  // block 3 waits behind the gap
  r.rx.poll(t0 + 300ms);
  const auto& c = r.rx.counters();
  EXPECT_EQ(c.incomplete_blocks, 1u);
  EXPECT_EQ(c.released_blocks, 2u);
  auto got = drain(r.fifos);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].block.block_num, bs[0].number());
  EXPECT_EQ(got[1].block.block_num, bs[2].number());
}

TEST(Receiver, MissingIdentityFailsBlock) {
  auto bs = blocks(2);
  auto stream = encode_stream(net(), bs);
  std::vector<Bytes> no_sync;
  for (auto& d : stream.datagrams) {
    if (parse_packet(d).type != SectionType::cache_sync) no_sync.push_back(d);
  }
  Rx r;
  r.feed(no_sync);
  EXPECT_EQ(r.rx.counters().failed_blocks, 2u);
  EXPECT_EQ(r.rx.counters().released_blocks, 0u);
  EXPECT_TRUE(drain(r.fifos).empty());
}

TEST(Receiver, NonProtocolTrafficBypasses) {
  Rx r;
  Bytes other{9, 9, 9};
  r.rx.ingest(other, 8080);
  r.rx.ingest(other, kDefaultPort);
  EXPECT_EQ(r.bypassed, std::vector<std::uint16_t>{8080});
  EXPECT_EQ(r.rx.counters().normal_packets, 1u);
  EXPECT_EQ(r.rx.counters().malformed_packets, 1u);
}

TEST(Receiver, CorruptedSignatureStillReassembles) {
  auto b = blocks(1).front();
  b.transactions[0].client_signature = Bytes{0x30, 0x03, 0x02, 0x01, 0x00};
  auto stream = encode_stream(net(), {b});
  Rx r;
  r.feed(stream.datagrams);
  auto got = drain(r.fifos);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_TRUE(got[0].txs[0].client.pre_failed);
  EXPECT_EQ(got, reference({b}));
}

TEST(Stream, WireSmallerThanBaseline) {
  auto stream = encode_stream(net(), blocks(3, 50, 2));
  double ratio = static_cast<double>(stream.baseline_bytes) / static_cast<double>(stream.wire_bytes);
  EXPECT_GT(ratio, 2.0);
}
