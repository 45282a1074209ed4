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
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bmac/block.hpp"
#include "bmac/policy.hpp"
#include "bmac/results.hpp"
#include "bmac/statedb.hpp"
#include "bmac/verify_engine.hpp"

namespace bmac {

struct OracleCounts {
  std::uint64_t block_verifications = 0;
  std::uint64_t tx_verifications = 0;
  std::uint64_t endorsement_verifications = 0;
  std::uint64_t policy_steps = 0;  // sub-expressions evaluated
};

struct OracleResult {
  std::uint64_t block_num = 0;
  bool block_valid = false;
  BlockStatus status = BlockStatus::ok;
  std::vector<TxFlag> flags;
  std::vector<std::uint8_t> tx_endorsement_verifications;
  OracleCounts counts;
};

/// Sequential reference validator: verify the orderer signature, then per
/// transaction the client signature, every endorsement, the policy (full
/// left-to-right evaluation) and the read set, applying writes of valid
/// transactions as it goes. Single-threaded and deterministic.
class ReferenceValidator {
 public:
  ReferenceValidator(std::vector<std::string> org_names, const PolicyTable& policies,
                     std::size_t capacity = kDefaultStoreCapacity);

  /// `state` is updated in place. Each verification performed is written
  /// to `record` when given.
  OracleResult validate(const Block& block, KvStore::Snapshot& state, VerdictTable* record = nullptr);

 private:
  struct Signer {
    std::shared_ptr<const PublicKey> key;
    Principal principal;
    bool known = false;
  };
  const Signer& signer(const Bytes& cert);
  bool check(const Signer& s, ByteView der, const Hash32& digest, VerdictTable* record);

  std::vector<std::string> orgs_;
  const PolicyTable& policies_;
  std::size_t capacity_;
  std::map<Bytes, Signer> signers_;
};

/// Convenience wrapper over ReferenceValidator for a single block.
OracleResult validate_block_reference(const Block& block, KvStore::Snapshot& state, const PolicyTable& policies,
                                      const std::vector<std::string>& org_names,
                                      std::size_t capacity = kDefaultStoreCapacity);

}  // namespace bmac
