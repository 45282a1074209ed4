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

#include "bmac/baseline_codec.hpp"

#include <limits>

#include "bmac/error.hpp"

namespace bmac {

bool is_container_tag(std::uint8_t t) {
  switch (t) {
    case tag::kBlock:
    case tag::kHeader:
    case tag::kData:
    case tag::kTransaction:
    case tag::kPayload:
    case tag::kChannelHeader:
    case tag::kInput:
    case tag::kReadSet:
    case tag::kRead:
    case tag::kWriteSet:
    case tag::kWrite:
    case tag::kResponse:
    case tag::kMetadata:
    case tag::kEndorsements:
    case tag::kEndorsement:
      return true;
    default:
      return false;
  }
}

Element ElementReader::next() {
  std::size_t at = base_ + pos_;
  if (data_.size() - pos_ < kElementHeaderSize) throw DecodeError("truncated element header", at);
  Element e;
  e.tag = data_[pos_];
  std::size_t len = get_u32(&data_[pos_ + 1]);
  if (data_.size() - pos_ - kElementHeaderSize < len) {
    throw DecodeError("element length exceeds buffer", at + 1);
  }
  e.offset = at;
  e.value_offset = at + kElementHeaderSize;
  e.value = data_.subspan(pos_ + kElementHeaderSize, len);
  pos_ += kElementHeaderSize + len;
  return e;
}

Element ElementReader::expect(std::uint8_t t) {
  std::size_t at = base_ + pos_;
  if (done()) throw DecodeError("missing element", at);
  Element e = next();
  if (e.tag != t) throw DecodeError("tag mismatch", at);
  return e;
}

void ElementReader::finish() const {
  if (!done()) throw DecodeError("unexpected trailing element", base_ + pos_);
}

Element read_single(ByteView data, std::uint8_t expected_tag, std::size_t base_offset) {
  ElementReader rd(data, base_offset);
  Element e = rd.expect(expected_tag);
  rd.finish();
  return e;
}

void for_each_element(ByteView data, const std::function<void(const Element&)>& visit,
                      std::size_t base_offset) {
  ElementReader rd(data, base_offset);
  while (!rd.done()) {
    Element e = rd.next();
    visit(e);
    if (is_container_tag(e.tag)) for_each_element(e.value, visit, e.value_offset);
  }
}

void put_element(Bytes& out, std::uint8_t t, ByteView value) {
  if (value.size() > std::numeric_limits<std::uint32_t>::max()) throw RangeError("element too large");
  out.push_back(t);
  put_u32(out, static_cast<std::uint32_t>(value.size()));
  append(out, value);
}

namespace {

// Builds nested elements in place, patching lengths on close.
class Writer {
 public:
  std::size_t open(std::uint8_t t) {
    out_.push_back(t);
    put_u32(out_, 0);
    return out_.size();
  }
  void close(std::size_t value_start) {
    auto len = static_cast<std::uint32_t>(out_.size() - value_start);
    std::uint8_t* p = &out_[value_start - 4];
    p[0] = static_cast<std::uint8_t>(len >> 24);
    p[1] = static_cast<std::uint8_t>(len >> 16);
    p[2] = static_cast<std::uint8_t>(len >> 8);
    p[3] = static_cast<std::uint8_t>(len);
  }
  void leaf(std::uint8_t t, ByteView v) { put_element(out_, t, v); }
  void leaf(std::uint8_t t, std::string_view s) { leaf(t, as_bytes(s)); }
  void u8(std::uint8_t t, std::uint8_t v) { leaf(t, ByteView(&v, 1)); }
  void u16(std::uint8_t t, std::uint16_t v) {
    Bytes b;
    put_u16(b, v);
    leaf(t, b);
  }
  void u32(std::uint8_t t, std::uint32_t v) {
    Bytes b;
    put_u32(b, v);
    leaf(t, b);
  }
  void u64(std::uint8_t t, std::uint64_t v) {
    Bytes b;
    put_u64(b, v);
    leaf(t, b);
  }
  void raw(ByteView b) { append(out_, b); }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

void write_payload(Writer& w, const TxPayload& p) {
  auto payload = w.open(tag::kPayload);
  {
    const auto& h = p.header;
    auto ch = w.open(tag::kChannelHeader);
    w.u8(tag::kTxType, h.type);
    w.u32(tag::kHeaderVersion, h.version);
    Bytes ts;
    put_u64(ts, static_cast<std::uint64_t>(h.timestamp_s));
    put_u32(ts, static_cast<std::uint32_t>(h.timestamp_ns));
    w.leaf(tag::kTimestamp, ts);
    w.leaf(tag::kChannelId, h.channel_id);
    w.leaf(tag::kTxId, h.tx_id);
    w.u64(tag::kEpoch, h.epoch);
    w.leaf(tag::kCcName, h.cc_name);
    w.leaf(tag::kCcVersion, h.cc_version);
    w.leaf(tag::kTlsCertHash, h.tls_cert_hash);
    w.close(ch);
  }
  w.leaf(tag::kNonce, p.nonce);
  w.u16(tag::kCcId, p.cc_id);
  auto input = w.open(tag::kInput);
  for (const auto& a : p.input_args) w.leaf(tag::kArg, a);
  w.close(input);
  auto rs = w.open(tag::kReadSet);
  for (const auto& r : p.reads) {
    auto e = w.open(tag::kRead);
    w.leaf(tag::kKey, r.key);
    Bytes v;
    put_u64(v, r.version.block_num);
    put_u32(v, r.version.tx_num);
    w.leaf(tag::kVersion, v);
    w.close(e);
  }
  w.close(rs);
  auto ws = w.open(tag::kWriteSet);
  for (const auto& wr : p.writes) {
    auto e = w.open(tag::kWrite);
    w.leaf(tag::kKey, wr.key);
    w.leaf(tag::kValue, wr.value);
    w.close(e);
  }
  w.close(ws);
  w.leaf(tag::kProposalHash, p.proposal_hash);
  auto resp = w.open(tag::kResponse);
  w.u32(tag::kStatus, p.response_status);
  w.leaf(tag::kMessage, p.response_message);
  w.leaf(tag::kResponsePayload, p.response_payload);
  w.close(resp);
  w.leaf(tag::kEvents, p.events);
  w.close(payload);
}

void write_transaction(Writer& w, const Transaction& tx) {
  auto t = w.open(tag::kTransaction);
  w.leaf(tag::kCertificate, tx.creator_cert);
  write_payload(w, tx.payload);
  auto ends = w.open(tag::kEndorsements);
  for (const auto& e : tx.endorsements) {
    auto en = w.open(tag::kEndorsement);
    w.leaf(tag::kCertificate, e.endorser_cert);
    w.leaf(tag::kEndorsementSignature, e.signature);
    w.close(en);
  }
  w.close(ends);
  w.leaf(tag::kClientSignature, tx.client_signature);
  w.close(t);
}

void write_header(Writer& w, const BlockHeader& h) {
  auto e = w.open(tag::kHeader);
  w.u64(tag::kNumber, h.number);
  w.leaf(tag::kPrevHash, h.prev_hash);
  w.leaf(tag::kDataHash, h.data_hash);
  w.close(e);
}

void write_metadata(Writer& w, const BlockMetadata& m) {
  auto e = w.open(tag::kMetadata);
  w.leaf(tag::kCertificate, m.orderer_cert);
  w.leaf(tag::kOrdererSignature, m.orderer_signature);
  w.close(e);
}

Bytes bytes_of(const Element& e) { return Bytes(e.value.begin(), e.value.end()); }
std::string string_of(const Element& e) { return std::string(as_chars(e.value)); }

std::uint64_t fixed_uint(const Element& e, std::size_t width) {
  if (e.value.size() != width) throw DecodeError("bad integer width", e.offset);
  std::uint64_t v = 0;
  for (auto b : e.value) v = (v << 8) | b;
  return v;
}

Hash32 hash_of(const Element& e) {
  if (e.value.size() != 32) throw DecodeError("bad hash width", e.offset);
  Hash32 h{};
  std::copy(e.value.begin(), e.value.end(), h.begin());
  return h;
}

TxPayload payload_from(const Element& pe) {
  TxPayload p;
  ElementReader rd(pe.value, pe.value_offset);
  {
    auto che = rd.expect(tag::kChannelHeader);
    ElementReader ch(che.value, che.value_offset);
    auto& h = p.header;
    h.type = static_cast<std::uint8_t>(fixed_uint(ch.expect(tag::kTxType), 1));
    h.version = static_cast<std::uint32_t>(fixed_uint(ch.expect(tag::kHeaderVersion), 4));
    auto ts = ch.expect(tag::kTimestamp);
    if (ts.value.size() != 12) throw DecodeError("bad timestamp width", ts.offset);
    h.timestamp_s = static_cast<std::int64_t>(get_u64(ts.value.data()));
    h.timestamp_ns = static_cast<std::int32_t>(get_u32(ts.value.data() + 8));
    h.channel_id = string_of(ch.expect(tag::kChannelId));
    h.tx_id = string_of(ch.expect(tag::kTxId));
    h.epoch = fixed_uint(ch.expect(tag::kEpoch), 8);
    h.cc_name = string_of(ch.expect(tag::kCcName));
    h.cc_version = string_of(ch.expect(tag::kCcVersion));
    h.tls_cert_hash = bytes_of(ch.expect(tag::kTlsCertHash));
    ch.finish();
  }
  p.nonce = bytes_of(rd.expect(tag::kNonce));
  p.cc_id = static_cast<std::uint16_t>(fixed_uint(rd.expect(tag::kCcId), 2));
  {
    auto in = rd.expect(tag::kInput);
    ElementReader args(in.value, in.value_offset);
    while (!args.done()) p.input_args.push_back(string_of(args.expect(tag::kArg)));
  }
  auto rs = rd.expect(tag::kReadSet);
  p.reads = decode_read_set(rs.value, rs.value_offset);
  auto ws = rd.expect(tag::kWriteSet);
  p.writes = decode_write_set(ws.value, ws.value_offset);
  p.proposal_hash = bytes_of(rd.expect(tag::kProposalHash));
  {
    auto re = rd.expect(tag::kResponse);
    ElementReader r(re.value, re.value_offset);
    p.response_status = static_cast<std::uint32_t>(fixed_uint(r.expect(tag::kStatus), 4));
    p.response_message = string_of(r.expect(tag::kMessage));
    p.response_payload = bytes_of(r.expect(tag::kResponsePayload));
    r.finish();
  }
  p.events = bytes_of(rd.expect(tag::kEvents));
  rd.finish();
  return p;
}

Transaction transaction_from(const Element& te) {
  Transaction tx;
  ElementReader rd(te.value, te.value_offset);
  tx.creator_cert = bytes_of(rd.expect(tag::kCertificate));
  tx.payload = payload_from(rd.expect(tag::kPayload));
  auto ends = rd.expect(tag::kEndorsements);
  ElementReader er(ends.value, ends.value_offset);
  while (!er.done()) {
    auto en = er.expect(tag::kEndorsement);
    ElementReader inner(en.value, en.value_offset);
    Endorsement e;
    e.endorser_cert = bytes_of(inner.expect(tag::kCertificate));
    e.signature = bytes_of(inner.expect(tag::kEndorsementSignature));
    inner.finish();
    tx.endorsements.push_back(std::move(e));
  }
  tx.client_signature = bytes_of(rd.expect(tag::kClientSignature));
  rd.finish();
  return tx;
}

BlockHeader header_from(const Element& he) {
  BlockHeader h;
  ElementReader rd(he.value, he.value_offset);
  h.number = fixed_uint(rd.expect(tag::kNumber), 8);
  h.prev_hash = hash_of(rd.expect(tag::kPrevHash));
  h.data_hash = hash_of(rd.expect(tag::kDataHash));
  rd.finish();
  return h;
}

BlockMetadata metadata_from(const Element& me) {
  BlockMetadata m;
  ElementReader rd(me.value, me.value_offset);
  m.orderer_cert = bytes_of(rd.expect(tag::kCertificate));
  m.orderer_signature = bytes_of(rd.expect(tag::kOrdererSignature));
  rd.finish();
  return m;
}

}  // namespace

Bytes encode_header(const BlockHeader& h) {
  Writer w;
  write_header(w, h);
  return w.take();
}

Bytes encode_payload(const TxPayload& p) {
  Writer w;
  write_payload(w, p);
  return w.take();
}

Bytes encode_transaction(const Transaction& tx) {
  Writer w;
  write_transaction(w, tx);
  return w.take();
}

Bytes encode_metadata(const BlockMetadata& m) {
  Writer w;
  write_metadata(w, m);
  return w.take();
}

Bytes encode_baseline(const Block& block) {
  Writer w;
  auto b = w.open(tag::kBlock);
  write_header(w, block.header);
  auto data = w.open(tag::kData);
  for (const auto& tx : block.transactions) write_transaction(w, tx);
  w.close(data);
  write_metadata(w, block.metadata);
  w.close(b);
  return w.take();
}

BlockHeader decode_header(ByteView section, std::size_t base) {
  return header_from(read_single(section, tag::kHeader, base));
}

TxPayload decode_payload(ByteView element, std::size_t base) {
  return payload_from(read_single(element, tag::kPayload, base));
}

Transaction decode_transaction(ByteView section, std::size_t base) {
  return transaction_from(read_single(section, tag::kTransaction, base));
}

BlockMetadata decode_metadata(ByteView section, std::size_t base) {
  return metadata_from(read_single(section, tag::kMetadata, base));
}

Block decode_baseline(ByteView bytes) {
  auto be = read_single(bytes, tag::kBlock);
  ElementReader rd(be.value, be.value_offset);
  Block block;
  block.header = header_from(rd.expect(tag::kHeader));
  auto data = rd.expect(tag::kData);
  ElementReader txs(data.value, data.value_offset);
  while (!txs.done()) block.transactions.push_back(transaction_from(txs.expect(tag::kTransaction)));
  block.metadata = metadata_from(rd.expect(tag::kMetadata));
  rd.finish();
  return block;
}

std::vector<ReadEntry> decode_read_set(ByteView value, std::size_t base) {
  std::vector<ReadEntry> out;
  ElementReader rd(value, base);
  while (!rd.done()) {
    auto re = rd.expect(tag::kRead);
    ElementReader r(re.value, re.value_offset);
    ReadEntry e;
    e.key = string_of(r.expect(tag::kKey));
    auto v = r.expect(tag::kVersion);
    if (v.value.size() != 12) throw DecodeError("bad version width", v.offset);
    e.version.block_num = get_u64(v.value.data());
    e.version.tx_num = get_u32(v.value.data() + 8);
    r.finish();
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<WriteEntry> decode_write_set(ByteView value, std::size_t base) {
  std::vector<WriteEntry> out;
  ElementReader rd(value, base);
  while (!rd.done()) {
    auto we = rd.expect(tag::kWrite);
    ElementReader w(we.value, we.value_offset);
    WriteEntry e;
    e.key = string_of(w.expect(tag::kKey));
    e.value = bytes_of(w.expect(tag::kValue));
    w.finish();
    out.push_back(std::move(e));
  }
  return out;
}

ByteView tx_signed_region(ByteView tx_section) {
  auto te = read_single(tx_section, tag::kTransaction);
  ElementReader rd(te.value, te.value_offset);
  rd.expect(tag::kCertificate);
  rd.expect(tag::kPayload);
  rd.expect(tag::kEndorsements);
  std::size_t sig_at = rd.offset();
  rd.expect(tag::kClientSignature);
  rd.finish();
  return tx_section.subspan(kElementHeaderSize, sig_at - kElementHeaderSize);
}

std::size_t identity_bytes(ByteView encoded) {
  std::size_t total = 0;
  for_each_element(encoded, [&](const Element& e) {
    if (e.tag == tag::kCertificate) total += e.size();
  });
  return total;
}

}  // namespace bmac
