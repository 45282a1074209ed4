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

#include "bmac/fifo_entries.hpp"

#include "bmac/baseline_codec.hpp"
#include "bmac/error.hpp"

namespace bmac {

bool VerifyRequest::operator==(const VerifyRequest& o) const {
  bool same_key = (key == o.key) || (key && o.key && *key == *o.key);
  return same_key && sig == o.sig && digest == o.digest && pre_failed == o.pre_failed;
}

VerifyRequest make_request(ByteView der_sig, std::shared_ptr<const PublicKey> key, const Hash32& digest) {
  VerifyRequest r;
  r.key = std::move(key);
  r.digest = digest;
  try {
    r.sig = der_decode_signature(der_sig);
  } catch (const DecodeError&) {
    r.pre_failed = true;
  }
  return r;
}

bool emit(const BlockEntries& e, FifoSet& fifos) {
  if (!fifos.block.push(e.block)) return false;
  std::size_t end_i = 0;
  std::size_t rd_i = 0;
  std::size_t wr_i = 0;
  for (const auto& tx : e.txs) {
    if (!fifos.tx.push(tx)) return false;
    for (std::uint32_t k = 0; k < tx.num_ends; ++k) {
      if (!fifos.ends.push(e.ends.at(end_i++))) return false;
    }
    for (std::uint32_t k = 0; k < tx.rdset_size; ++k) {
      if (!fifos.rdset.push(e.reads.at(rd_i++))) return false;
    }
    for (std::uint32_t k = 0; k < tx.wrset_size; ++k) {
      if (!fifos.wrset.push(e.writes.at(wr_i++))) return false;
    }
  }
  return true;
}

std::vector<BlockEntries> drain(FifoSet& fifos) {
  std::vector<BlockEntries> out;
  while (auto b = fifos.block.try_pop()) {
    BlockEntries e;
    e.block = std::move(*b);
    for (std::uint32_t i = 0; i < e.block.num_txs; ++i) {
      auto tx = fifos.tx.try_pop();
      if (!tx) throw ProtocolError("tx fifo underflow while draining");
      for (std::uint32_t k = 0; k < tx->num_ends; ++k) e.ends.push_back(fifos.ends.try_pop().value());
      for (std::uint32_t k = 0; k < tx->rdset_size; ++k) e.reads.push_back(fifos.rdset.try_pop().value());
      for (std::uint32_t k = 0; k < tx->wrset_size; ++k) e.writes.push_back(fifos.wrset.try_pop().value());
      e.txs.push_back(std::move(*tx));
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

IdentityCache::Entry entry_for(const IdentityCache& cache, ByteView cert, EncodedId* id_out = nullptr) {
  auto id = cache.find(cert);
  if (!id) throw MissingIdentityError(0xFFFF);
  if (id_out) *id_out = *id;
  return cache.lookup(*id).value();
}

}  // namespace

BlockEntries reference_entries(const Block& block, const IdentityCache& cache) {
  BlockEntries out;
  const auto n = block.number();
  out.block.block_num = n;
  out.block.num_txs = static_cast<std::uint32_t>(block.transactions.size());
  out.block.orderer = make_request(block.metadata.orderer_signature,
                                   entry_for(cache, block.metadata.orderer_cert).key, block_digest(block));
  for (std::uint32_t t = 0; t < block.transactions.size(); ++t) {
    const auto& tx = block.transactions[t];
    TxFifoEntry te;
    te.block_num = n;
    te.tx_num = t;
    te.cc_id = tx.payload.cc_id;
    te.num_ends = static_cast<std::uint32_t>(tx.endorsements.size());
    te.rdset_size = static_cast<std::uint32_t>(tx.payload.reads.size());
    te.wrset_size = static_cast<std::uint32_t>(tx.payload.writes.size());
    te.client = make_request(tx.client_signature, entry_for(cache, tx.creator_cert).key, tx_digest(tx));
    out.txs.push_back(std::move(te));
    for (const auto& e : tx.endorsements) {
      EndsFifoEntry ee;
      ee.block_num = n;
      ee.tx_num = t;
      auto entry = entry_for(cache, e.endorser_cert, &ee.endorser_id);
      ee.request = make_request(e.signature, entry.key, endorsement_digest(tx.payload, e.endorser_cert));
      out.ends.push_back(std::move(ee));
    }
    for (const auto& r : tx.payload.reads) out.reads.push_back({n, t, r.key, r.version});
    for (const auto& w : tx.payload.writes) out.writes.push_back({n, t, w.key, w.value});
  }
  return out;
}

}  // namespace bmac
