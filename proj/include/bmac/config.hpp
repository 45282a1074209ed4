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

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bmac/identity.hpp"
#include "bmac/pipeline.hpp"
#include "bmac/policy.hpp"
#include "bmac/wire_format.hpp"

namespace bmac {

struct NodeSpec {
  Role role = Role::peer;
  int seq = 0;
};

struct OrgSpec {
  std::string name;
  std::vector<NodeSpec> nodes;
};

struct ChaincodeSpec {
  std::uint16_t cc_id = 0;
  std::string name;
  std::string policy;
};

struct ProtocolSettings {
  std::uint16_t port = kDefaultPort;
  std::size_t max_frame = kDefaultMaxFrame;
  std::chrono::milliseconds reassembly_deadline{250};
};

enum class WorkloadProfile { smallbank, drm, split };

struct WorkloadSettings {
  WorkloadProfile profile = WorkloadProfile::smallbank;
  std::size_t blocks = 150;
  std::size_t block_size = 100;
  std::size_t endorsements_per_tx = 2;
  std::size_t accounts = 1000;
  std::vector<std::uint16_t> chaincodes;  // drawn uniformly; empty = all
  int split_writes = 4;
  int drm_reads = 1;
  int drm_writes = 1;
  double invalid_sig_rate = 0;
  double unsatisfiable_rate = 0;
  double conflict_rate = 0;
  std::size_t total_txs = 0;  // validator stops after this many; 0 = blocks * block_size
  bool parallel_signing = true;
};

struct NetworkConfig {
  std::uint64_t seed = 1;
  std::size_t cert_size = kDefaultCertSize;
  std::vector<OrgSpec> orgs;
  std::vector<ChaincodeSpec> chaincodes;
  PipelineConfig pipeline;
  std::size_t mailbox_depth = 1;
  std::size_t fifo_capacity = 1 << 16;
  ProtocolSettings protocol;
  std::size_t state_capacity = kDefaultStoreCapacity;
  WorkloadSettings workload;

  static NetworkConfig load(const std::string& path);
  /// Throws ConfigError with the offending key on schema violations.
  static NetworkConfig parse(const std::string& yaml_text);

  std::vector<std::string> org_names() const;
  PolicyContext policy_context() const;
  /// Cross-field checks (keyspace vs capacity, ids, policies).
  void validate() const;
};

/// A node with its deterministic key pair and certificate.
struct Identity {
  std::string org;
  int org_index = 0;
  Role role = Role::peer;
  int seq = 0;
  EncodedId id;
  PrivateKey key;
  Bytes cert;
};

/// NetworkConfig with keys, certificates and compiled policies.
class Network {
 public:
  explicit Network(NetworkConfig config);

  const NetworkConfig& config() const { return config_; }
  const std::vector<Identity>& identities() const { return identities_; }
  const Identity& orderer() const;
  std::vector<const Identity*> clients() const;
  /// First node of `org` with `role`, or nullptr.
  const Identity* node(int org_index, Role role) const;
  const PolicyTable& policies() const { return policies_; }
  std::vector<std::string> org_names() const { return config_.org_names(); }

  /// Cache with every configured certificate registered.
  std::unique_ptr<IdentityCache> make_cache(bool preload) const;

 private:
  NetworkConfig config_;
  std::vector<Identity> identities_;
  PolicyTable policies_;
};

/// Key material for a node: a function of the network seed and the node's
/// (org, role, seq) only.
PrivateKey derive_node_key(std::uint64_t seed, const std::string& org, Role role, int seq);

}  // namespace bmac
