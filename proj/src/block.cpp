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

#include "bmac/block.hpp"

#include "bmac/baseline_codec.hpp"
#include "bmac/error.hpp"
#include "bmac/sha256.hpp"

namespace bmac {

Hash32 tx_digest(const Transaction& tx) {
  Bytes section = encode_transaction(tx);
  return Sha256::digest(tx_signed_region(section));
}

Hash32 endorsement_digest(const TxPayload& payload, ByteView endorser_cert) {
  return Sha256().update(encode_payload(payload)).update(endorser_cert).finish();
}

Hash32 block_digest(ByteView header_section, const std::vector<Bytes>& tx_sections) {
  Sha256 h;
  h.update(header_section);
  for (const auto& s : tx_sections) h.update(s);
  return h.finish();
}

Hash32 block_digest(const Block& block) {
  std::vector<Bytes> txs;
  txs.reserve(block.transactions.size());
  for (const auto& tx : block.transactions) txs.push_back(encode_transaction(tx));
  return block_digest(encode_header(block.header), txs);
}

Hash32 data_hash(const std::vector<Bytes>& tx_sections) {
  Sha256 h;
  for (const auto& s : tx_sections) h.update(s);
  return h.finish();
}

Endorsement endorse(const TxPayload& payload, const PrivateKey& endorser_key, ByteView endorser_cert) {
  Endorsement e;
  e.endorser_cert.assign(endorser_cert.begin(), endorser_cert.end());
  e.signature = sign(endorsement_digest(payload, endorser_cert), endorser_key);
  return e;
}

Transaction client_sign(Transaction tx, const PrivateKey& client_key) {
  tx.client_signature = sign(tx_digest(tx), client_key);
  return tx;
}

Block build_signed_block(std::uint64_t number, const Hash32& prev_hash, std::vector<Transaction> txs,
                         const PrivateKey& orderer_key, ByteView orderer_cert, std::size_t max_txs) {
  if (txs.empty()) throw RangeError("a block needs at least one transaction");
  if (txs.size() > max_txs) {
    throw RangeError("block of " + std::to_string(txs.size()) + " transactions exceeds limit " +
                     std::to_string(max_txs));
  }
  Block b;
  b.header.number = number;
  b.header.prev_hash = prev_hash;
  std::vector<Bytes> sections;
  sections.reserve(txs.size());
  for (const auto& tx : txs) sections.push_back(encode_transaction(tx));
  b.header.data_hash = data_hash(sections);
  b.transactions = std::move(txs);
  b.metadata.orderer_cert.assign(orderer_cert.begin(), orderer_cert.end());
  b.metadata.orderer_signature = sign(block_digest(encode_header(b.header), sections), orderer_key);
  return b;
}

}  // namespace bmac
