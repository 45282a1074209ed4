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

#include "bmac/oracle.hpp"

#include <algorithm>
#include <unordered_set>

#include "bmac/error.hpp"
#include "bmac/identity.hpp"

namespace bmac {

ReferenceValidator::ReferenceValidator(std::vector<std::string> org_names, const PolicyTable& policies,
                                       std::size_t capacity)
    : orgs_(std::move(org_names)), policies_(policies), capacity_(capacity) {}

const ReferenceValidator::Signer& ReferenceValidator::signer(const Bytes& cert) {
  auto it = signers_.find(cert);
  if (it != signers_.end()) return it->second;
  Signer s;
  try {
    auto c = Certificate::parse(cert);
    s.key = std::make_shared<const PublicKey>(PublicKey::from_bytes(c.public_key));
    auto org = std::find(orgs_.begin(), orgs_.end(), c.org_name);
    if (org != orgs_.end()) {
      s.principal = Principal{static_cast<int>(org - orgs_.begin()), c.role};
      s.known = true;
    }
  } catch (const DecodeError&) {
    s.key.reset();
  }
  return signers_.emplace(cert, std::move(s)).first->second;
}

bool ReferenceValidator::check(const Signer& s, ByteView der, const Hash32& digest, VerdictTable* record) {
  if (!s.key) return false;
  RawSignature raw;
  try {
    raw = der_decode_signature(der);
  } catch (const DecodeError&) {
    return false;
  }
  bool ok = verify(der, *s.key, digest);
  if (record) record->record(*s.key, digest, raw, ok);
  return ok;
}

OracleResult ReferenceValidator::validate(const Block& block, KvStore::Snapshot& state, VerdictTable* record) {
  OracleResult r;
  r.block_num = block.number();
  const auto n = block.transactions.size();
  r.tx_endorsement_verifications.assign(n, 0);

  ++r.counts.block_verifications;
  r.block_valid = check(signer(block.metadata.orderer_cert), block.metadata.orderer_signature,
                        block_digest(block), record);
  if (!r.block_valid) {
    r.flags.assign(n, TxFlag::skipped_block_invalid);
    return r;
  }

  for (std::size_t t = 0; t < n; ++t) {
    const auto& tx = block.transactions[t];
    ++r.counts.tx_verifications;
    if (!check(signer(tx.creator_cert), tx.client_signature, tx_digest(tx), record)) {
      r.flags.push_back(TxFlag::invalid_sig);
      continue;
    }

    std::vector<Principal> valid;
    for (const auto& e : tx.endorsements) {
      ++r.counts.endorsement_verifications;
      ++r.tx_endorsement_verifications[t];
      const auto& s = signer(e.endorser_cert);
      if (check(s, e.signature, endorsement_digest(tx.payload, e.endorser_cert), record) && s.known) {
        valid.push_back(s.principal);
      }
    }
    const auto* policy = policies_.find(tx.payload.cc_id);
    if (!policy || !evaluate_sequential(policy->expr, valid, &r.counts.policy_steps)) {
      r.flags.push_back(TxFlag::invalid_policy);
      continue;
    }

    if (r.status != BlockStatus::ok) {
      r.flags.push_back(TxFlag::invalid_mvcc);
      continue;
    }
    bool reads_ok = std::all_of(tx.payload.reads.begin(), tx.payload.reads.end(), [&](const ReadEntry& rd) {
      auto it = state.find(rd.key);
      return it == state.end() ? rd.version == Version{} : it->second.version == rd.version;
    });
    if (!reads_ok) {
      r.flags.push_back(TxFlag::invalid_mvcc);
      continue;
    }
    std::unordered_set<std::string> fresh;
    for (const auto& w : tx.payload.writes) {
      if (!state.contains(w.key)) fresh.insert(w.key);
    }
    if (state.size() + fresh.size() > capacity_) {
      r.status = BlockStatus::capacity_exceeded;
      r.flags.push_back(TxFlag::invalid_mvcc);
      continue;
    }
    const Version v{block.number(), static_cast<std::uint32_t>(t)};
    for (const auto& w : tx.payload.writes) state[w.key] = VersionedValue{w.value, v};
    r.flags.push_back(TxFlag::valid);
  }
  return r;
}

OracleResult validate_block_reference(const Block& block, KvStore::Snapshot& state, const PolicyTable& policies,
                                      const std::vector<std::string>& org_names, std::size_t capacity) {
  ReferenceValidator v(org_names, policies, capacity);
  return v.validate(block, state);
}

}  // namespace bmac
