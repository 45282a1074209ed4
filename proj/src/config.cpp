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

#include "bmac/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bmac/error.hpp"

namespace bmac {
namespace {

template <typename T>
T get(const YAML::Node& n, const char* key, T fallback, const std::string& where) {
  if (!n || !n[key]) return fallback;
  try {
    return n[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(where + "." + key + ": " + e.msg);
  }
}

WorkloadProfile parse_profile(const std::string& s) {
  if (s == "smallbank") return WorkloadProfile::smallbank;
  if (s == "drm") return WorkloadProfile::drm;
  if (s == "split") return WorkloadProfile::split;
  throw ConfigError("workload.profile: unknown profile '" + s + "' (smallbank, drm, split)");
}

}  // namespace

NetworkConfig NetworkConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

NetworkConfig NetworkConfig::parse(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config is not valid YAML: " + e.msg);
  }
  NetworkConfig c;
  c.seed = get<std::uint64_t>(root, "seed", c.seed, "");
  c.cert_size = get<std::size_t>(root, "cert_size", c.cert_size, "");

  if (!root["orgs"] || !root["orgs"].IsSequence()) throw ConfigError("orgs: required list");
  for (const auto& o : root["orgs"]) {
    OrgSpec org;
    org.name = get<std::string>(o, "name", "", "orgs[]");
    if (org.name.empty()) throw ConfigError("orgs[].name: required");
    if (o["nodes"]) {
      for (const auto& n : o["nodes"]) {
        NodeSpec node;
        node.role = parse_role(get<std::string>(n, "role", "peer", "orgs[].nodes[]"));
        node.seq = get<int>(n, "seq", 0, "orgs[].nodes[]");
        org.nodes.push_back(node);
      }
    }
    c.orgs.push_back(std::move(org));
  }

  if (root["chaincodes"]) {
    for (const auto& cc : root["chaincodes"]) {
      ChaincodeSpec spec;
      spec.cc_id = get<std::uint16_t>(cc, "id", 0, "chaincodes[]");
      spec.name = get<std::string>(cc, "name", "cc" + std::to_string(spec.cc_id), "chaincodes[]");
      spec.policy = get<std::string>(cc, "policy", "", "chaincodes[]");
      if (spec.policy.empty()) throw ConfigError("chaincodes[].policy: required");
      c.chaincodes.push_back(std::move(spec));
    }
  }

  const auto p = root["pipeline"];
  c.pipeline.lanes = get<unsigned>(p, "lanes", c.pipeline.lanes, "pipeline");
  c.pipeline.engines_per_vscc = get<unsigned>(p, "engines_per_vscc", c.pipeline.engines_per_vscc, "pipeline");
  auto delay = get<long>(p, "synthetic_delay_us", 0, "pipeline");
  if (delay < 0) throw ConfigError("pipeline.synthetic_delay_us: must be >= 0");
  if (delay > 0) c.pipeline.synthetic_delay = std::chrono::microseconds(delay);
  c.mailbox_depth = get<std::size_t>(p, "mailbox_depth", c.mailbox_depth, "pipeline");
  c.fifo_capacity = get<std::size_t>(p, "fifo_capacity", c.fifo_capacity, "pipeline");

  const auto pr = root["protocol"];
  c.protocol.port = get<std::uint16_t>(pr, "port", c.protocol.port, "protocol");
  c.protocol.max_frame = get<std::size_t>(pr, "max_frame", c.protocol.max_frame, "protocol");
  c.protocol.reassembly_deadline =
      std::chrono::milliseconds(get<long>(pr, "reassembly_deadline_ms", 250, "protocol"));

  c.state_capacity = get<std::size_t>(root["state"], "capacity", c.state_capacity, "state");

  const auto w = root["workload"];
  auto& ws = c.workload;
  ws.profile = parse_profile(get<std::string>(w, "profile", "smallbank", "workload"));
  ws.blocks = get<std::size_t>(w, "blocks", ws.blocks, "workload");
  ws.block_size = get<std::size_t>(w, "block_size", ws.block_size, "workload");
  ws.endorsements_per_tx = get<std::size_t>(w, "endorsements_per_tx", ws.endorsements_per_tx, "workload");
  ws.accounts = get<std::size_t>(w, "accounts", ws.accounts, "workload");
  if (w && w["chaincodes"]) ws.chaincodes = get<std::vector<std::uint16_t>>(w, "chaincodes", {}, "workload");
  ws.split_writes = get<int>(w, "split_writes", ws.split_writes, "workload");
  ws.drm_reads = get<int>(w, "drm_reads", ws.drm_reads, "workload");
  ws.drm_writes = get<int>(w, "drm_writes", ws.drm_writes, "workload");
  ws.invalid_sig_rate = get<double>(w, "invalid_sig_rate", ws.invalid_sig_rate, "workload");
  ws.unsatisfiable_rate = get<double>(w, "unsatisfiable_rate", ws.unsatisfiable_rate, "workload");
  ws.conflict_rate = get<double>(w, "conflict_rate", ws.conflict_rate, "workload");
  ws.total_txs = get<std::size_t>(w, "total_txs", ws.total_txs, "workload");
  ws.parallel_signing = get<bool>(w, "parallel_signing", ws.parallel_signing, "workload");

  c.validate();
  return c;
}

std::vector<std::string> NetworkConfig::org_names() const {
  std::vector<std::string> out;
  for (const auto& o : orgs) out.push_back(o.name);
  return out;
}

PolicyContext NetworkConfig::policy_context() const {
  PolicyContext ctx;
  ctx.org_names = org_names();
  for (std::size_t i = 0; i < orgs.size(); ++i) {
    bool has_peer = std::any_of(orgs[i].nodes.begin(), orgs[i].nodes.end(),
                                [](const NodeSpec& n) { return n.role == Role::peer; });
    if (has_peer) ctx.endorsing_orgs.push_back(static_cast<int>(i));
  }
  return ctx;
}

void NetworkConfig::validate() const {
  if (orgs.empty()) throw ConfigError("orgs: at least one org required");
  if (orgs.size() > 256) throw ConfigError("orgs: at most 256 orgs");
  std::set<std::string> names;
  std::set<std::tuple<std::string, int, int>> nodes;
  for (const auto& o : orgs) {
    if (!names.insert(o.name).second) throw ConfigError("orgs: duplicate org " + o.name);
    for (const auto& n : o.nodes) {
      if (n.seq < 0 || n.seq > 15) throw ConfigError("orgs[" + o.name + "].nodes: seq must be 0..15");
      if (!nodes.insert({o.name, static_cast<int>(n.role), n.seq}).second) {
        throw ConfigError("orgs[" + o.name + "].nodes: duplicate node");
      }
    }
  }
  std::set<std::uint16_t> ids;
  for (const auto& cc : chaincodes) {
    if (!ids.insert(cc.cc_id).second) throw ConfigError("chaincodes: duplicate id " + std::to_string(cc.cc_id));
  }
  for (auto id : workload.chaincodes) {
    if (!ids.contains(id)) throw ConfigError("workload.chaincodes: unknown chaincode id " + std::to_string(id));
  }
  pipeline.validate();
  if (mailbox_depth == 0) throw ConfigError("pipeline.mailbox_depth: must be positive");
  if (fifo_capacity == 0) throw ConfigError("pipeline.fifo_capacity: must be positive");
  if (protocol.max_frame < kFixedHeaderSize + 64 || protocol.max_frame > 65507) {
    throw ConfigError("protocol.max_frame: must be between 84 and 65507");
  }
  if (workload.accounts > state_capacity) {
    throw ConfigError("workload.accounts (" + std::to_string(workload.accounts) + ") exceeds state.capacity (" +
                      std::to_string(state_capacity) + ")");
  }
  if (workload.block_size == 0 || workload.block_size > kDefaultMaxBlockTxs) {
    throw ConfigError("workload.block_size: must be 1.." + std::to_string(kDefaultMaxBlockTxs));
  }
  for (double r : {workload.invalid_sig_rate, workload.unsatisfiable_rate, workload.conflict_rate}) {
    if (r < 0 || r > 1) throw ConfigError("workload: injection rates must be within [0, 1]");
  }
  if (workload.invalid_sig_rate + workload.unsatisfiable_rate + workload.conflict_rate > 1) {
    throw ConfigError("workload: injection rates sum above 1");
  }
  if (workload.split_writes < 1 || workload.drm_reads < 0 || workload.drm_writes < 0) {
    throw ConfigError("workload: split_writes must be >= 1 and drm reads/writes >= 0");
  }
}

PrivateKey derive_node_key(std::uint64_t seed, const std::string& org, Role role, int seq) {
  Bytes material;
  put_u64(material, seed);
  append(material, as_bytes(org));
  material.push_back(static_cast<std::uint8_t>(role));
  material.push_back(static_cast<std::uint8_t>(seq));
  return PrivateKey::derive(material);
}

Network::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.validate();
  for (std::size_t i = 0; i < config_.orgs.size(); ++i) {
    const auto& o = config_.orgs[i];
    for (const auto& n : o.nodes) {
      auto key = derive_node_key(config_.seed, o.name, n.role, n.seq);
      auto cert = Certificate::make(o.name, n.role, n.seq, key.public_key(), config_.cert_size).serialize();
      identities_.push_back(Identity{o.name, static_cast<int>(i), n.role, n.seq,
                                     encode_id(static_cast<int>(i), n.role, n.seq), key, std::move(cert)});
    }
  }
  policies_ = PolicyTable(config_.orgs.size());
  auto ctx = config_.policy_context();
  for (const auto& cc : config_.chaincodes) policies_.add(cc.cc_id, cc.name, cc.policy, ctx);
}

const Identity& Network::orderer() const {
  for (const auto& id : identities_) {
    if (id.role == Role::orderer) return id;
  }
  throw ConfigError("no orderer node configured");
}

std::vector<const Identity*> Network::clients() const {
  std::vector<const Identity*> out;
  for (const auto& id : identities_) {
    if (id.role == Role::client) out.push_back(&id);
  }
  return out;
}

const Identity* Network::node(int org_index, Role role) const {
  const Identity* best = nullptr;
  for (const auto& id : identities_) {
    if (id.org_index == org_index && id.role == role && (!best || id.seq < best->seq)) best = &id;
  }
  return best;
}

std::unique_ptr<IdentityCache> Network::make_cache(bool preload) const {
  auto cache = std::make_unique<IdentityCache>(org_names());
  if (preload) {
    for (const auto& id : identities_) cache->register_cert(id.cert);
  }
  return cache;
}

}  // namespace bmac
