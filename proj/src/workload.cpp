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

#include "bmac/workload.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "bmac/error.hpp"
#include "bmac/sha256.hpp"

namespace bmac {
namespace {

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

Bytes amount(std::uint64_t v) {
  Bytes out;
  put_u64(out, v);
  return out;
}

const ChaincodePolicy& policy_for(const Network& net, std::uint16_t cc_id) {
  const auto* p = net.policies().find(cc_id);
  if (!p) throw ConfigError("no policy for chaincode " + std::to_string(cc_id));
  return *p;
}

}  // namespace

std::string account_key(std::uint32_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "acc_%08u", index);
  return buf;
}

void sign_plan(TxPlan& plan) {
  auto& tx = plan.tx;
  tx.endorsements.clear();
  for (std::size_t i = 0; i < plan.endorsers.size(); ++i) {
    const auto* e = plan.endorsers[i];
    if (plan.corrupt[i]) {
      auto d = endorsement_digest(tx.payload, e->cert);
      d[0] ^= 0x5A;
      tx.endorsements.push_back(Endorsement{e->cert, sign(d, e->key)});
    } else {
      tx.endorsements.push_back(endorse(tx.payload, e->key, e->cert));
    }
  }
  switch (plan.client_mode) {
    case ClientSigMode::honest:
      tx = client_sign(std::move(tx), plan.client->key);
      break;
    case ClientSigMode::wrong_digest: {
      auto d = tx_digest(tx);
      d[31] ^= 0x01;
      tx.client_signature = sign(d, plan.client->key);
      break;
    }
    case ClientSigMode::bad_der:
      tx.client_signature = Bytes{0x30, 0x03, 0x02, 0x01, 0x00};
      break;
  }
}

std::vector<Transaction> sign_plans(std::vector<TxPlan>& plans, bool parallel) {
  const long n = static_cast<long>(plans.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) sign_plan(plans[static_cast<std::size_t>(i)]);
  std::vector<Transaction> out;
  out.reserve(plans.size());
  for (auto& p : plans) out.push_back(std::move(p.tx));
  return out;
}

WorkloadGenerator::WorkloadGenerator(const Network& net, WorkloadSettings settings, std::uint64_t seed)
    : net_(net), settings_(std::move(settings)), rng_(seed) {
  if (settings_.accounts == 0) throw ConfigError("workload.accounts: must be positive");
  if (settings_.accounts > net_.config().state_capacity) {
    throw ConfigError("workload.accounts exceeds state capacity");
  }
  perm_.resize(settings_.accounts);
  std::iota(perm_.begin(), perm_.end(), 0u);
  chaincodes_ = settings_.chaincodes;
  if (chaincodes_.empty()) {
    for (const auto& [id, p] : net_.policies().all()) chaincodes_.push_back(id);
  }
  if (chaincodes_.empty()) throw ConfigError("workload: no chaincodes configured");
  for (auto id : chaincodes_) {
    for (const auto& pr : policy_for(net_, id).compiled.principals()) {
      if (!net_.node(pr.org, pr.role)) {
        throw ConfigError("chaincode " + std::to_string(id) + " needs a " + std::string(role_name(pr.role)) +
                          " node in org " + net_.org_names()[static_cast<std::size_t>(pr.org)]);
      }
    }
  }
  clients_ = net_.clients();
  if (clients_.empty()) throw ConfigError("workload: no client nodes configured");
}

std::string WorkloadGenerator::draw_account() {
  if (perm_pos_ == perm_.size()) {
    throw ConfigError("workload: block needs more distinct accounts than workload.accounts");
  }
  std::uniform_int_distribution<std::size_t> pick(perm_pos_, perm_.size() - 1);
  std::swap(perm_[perm_pos_], perm_[pick(rng_)]);
  return account_key(perm_[perm_pos_++]);
}

Version WorkloadGenerator::committed(const std::string& key) const {
  auto it = committed_.find(key);
  return it == committed_.end() ? Version{} : it->second;
}

TxPlan WorkloadGenerator::plan_tx(std::uint32_t tx_num, Injection inj) {
  TxPlan plan;
  std::uniform_int_distribution<std::size_t> pick_client(0, clients_.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_cc(0, chaincodes_.size() - 1);
  plan.client = clients_[pick_client(rng_)];
  const auto cc_id = chaincodes_[pick_cc(rng_)];
  const auto& policy = policy_for(net_, cc_id);

  auto& tx = plan.tx;
  tx.creator_cert = plan.client->cert;
  auto& p = tx.payload;
  p.cc_id = cc_id;
  p.header.cc_name = policy.name;
  p.header.timestamp_s = static_cast<std::int64_t>(1'700'000'000 + number_);
  p.header.timestamp_ns = static_cast<std::int32_t>(tx_num * 1000);
  p.nonce = random_bytes(rng_, 24);
  Bytes id_material = p.nonce;
  append(id_material, tx.creator_cert);
  p.header.tx_id = to_hex(Sha256::digest(id_material));
  p.header.tls_cert_hash = random_bytes(rng_, 32);

  // Keys touched, then reads/writes by profile.
  std::vector<std::string> keys;
  std::string op;
  std::size_t n_reads = 0, n_writes = 0;
  switch (settings_.profile) {
    case WorkloadProfile::smallbank: {
      static const char* kOps[] = {"send_payment", "amalgamate", "deposit_checking", "transact_savings"};
      std::uniform_int_distribution<int> pick_op(0, 3);
      int o = pick_op(rng_);
      op = kOps[o];
      n_reads = n_writes = o < 2 ? 2 : 1;
      break;
    }
    case WorkloadProfile::split:
      op = "split_payment";
      n_reads = 1;
      n_writes = static_cast<std::size_t>(settings_.split_writes);
      break;
    case WorkloadProfile::drm:
      op = "play";
      n_reads = static_cast<std::size_t>(settings_.drm_reads);
      n_writes = static_cast<std::size_t>(settings_.drm_writes);
      break;
  }
  for (std::size_t i = 0; i < std::max(n_reads, n_writes); ++i) keys.push_back(draw_account());
  std::uniform_int_distribution<std::uint64_t> pick_amount(1, 1'000'000);
  p.input_args.push_back(op);
  for (const auto& k : keys) p.input_args.push_back(k);
  p.input_args.push_back(std::to_string(pick_amount(rng_)));
  for (std::size_t i = 0; i < n_reads; ++i) p.reads.push_back({keys[i], committed(keys[i])});
  for (std::size_t i = 0; i < n_writes; ++i) p.writes.push_back({keys[i], amount(pick_amount(rng_))});

  if (inj == Injection::conflict && p.reads.empty()) inj = Injection::none;
  if (inj == Injection::conflict) {
    std::bernoulli_distribution coin(0.5);
    if (!block_writes_.empty() && coin(rng_)) {
      // Read a key an earlier transaction of this block overwrites.
      std::uniform_int_distribution<std::size_t> pick(0, block_writes_.size() - 1);
      auto it = std::next(block_writes_.begin(), static_cast<long>(pick(rng_)));
      p.reads[0] = {it->first, committed(it->first)};
    } else {
      auto& r = p.reads[0];
      if (r.version == Version{}) {
        r.version = Version{std::max<std::uint64_t>(1, number_ - 1), 0};
      } else {
        r.version = r.version.block_num > 1 ? Version{r.version.block_num - 1, r.version.tx_num} : Version{};
      }
    }
  }

  Bytes args;
  for (const auto& a : p.input_args) append(args, as_bytes(a));
  auto ph = Sha256::digest(args);
  p.proposal_hash.assign(ph.begin(), ph.end());
  p.response_payload = amount(pick_amount(rng_));

  // Endorsers: a random satisfying term, topped up to the requested count
  // from the policy's other principals, in random order.
  const auto& compiled = policy.compiled;
  std::uniform_int_distribution<std::size_t> pick_term(0, compiled.terms().size() - 1);
  std::uint64_t term = compiled.terms()[pick_term(rng_)];
  std::vector<std::size_t> chosen, rest;
  for (std::size_t i = 0; i < compiled.principals().size(); ++i) (term >> i & 1u ? chosen : rest).push_back(i);
  std::shuffle(rest.begin(), rest.end(), rng_);
  for (std::size_t i = 0; i < rest.size() && chosen.size() < settings_.endorsements_per_tx; ++i) {
    chosen.push_back(rest[i]);
  }
  std::shuffle(chosen.begin(), chosen.end(), rng_);
  for (auto i : chosen) {
    const auto& pr = compiled.principals()[i];
    plan.endorsers.push_back(net_.node(pr.org, pr.role));
  }
  plan.corrupt.assign(plan.endorsers.size(), false);

  if (inj == Injection::unsatisfiable) {
    std::vector<std::size_t> order(chosen.size());
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng_);
    for (auto i : order) {
      plan.corrupt[i] = true;
      std::vector<Principal> valid;
      for (std::size_t j = 0; j < chosen.size(); ++j) {
        if (!plan.corrupt[j]) valid.push_back(compiled.principals()[chosen[j]]);
      }
      if (!evaluate_sequential(policy.expr, valid)) break;
    }
  }
  if (inj == Injection::invalid_sig) {
    std::bernoulli_distribution coin(0.75);
    plan.client_mode = coin(rng_) ? ClientSigMode::wrong_digest : ClientSigMode::bad_der;
  }
  if (inj == Injection::none) {
    for (const auto& w : p.writes) block_writes_[w.key] = Version{number_, tx_num};
  }
  return plan;
}

GeneratedBlock WorkloadGenerator::next(std::size_t size) {
  if (size == 0 || size > kDefaultMaxBlockTxs) throw RangeError("block size must be 1..256");
  GeneratedBlock g;
  perm_pos_ = 0;
  block_writes_.clear();
  const double r1 = settings_.invalid_sig_rate;
  const double r2 = r1 + settings_.unsatisfiable_rate;
  const double r3 = r2 + settings_.conflict_rate;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TxPlan> plans;
  for (std::uint32_t t = 0; t < size; ++t) {
    double x = u(rng_);
    Injection inj = x < r1 ? Injection::invalid_sig
                  : x < r2 ? Injection::unsatisfiable
                  : x < r3 ? Injection::conflict
                           : Injection::none;
    plans.push_back(plan_tx(t, inj));
    // plan_tx may downgrade a conflict it cannot express.
    if (inj == Injection::conflict && plans.back().tx.payload.reads.empty()) inj = Injection::none;
    g.injections.push_back(inj);
    switch (inj) {
      case Injection::none: g.intended.push_back(TxFlag::valid); break;
      case Injection::invalid_sig: g.intended.push_back(TxFlag::invalid_sig); break;
      case Injection::unsatisfiable: g.intended.push_back(TxFlag::invalid_policy); break;
      case Injection::conflict: g.intended.push_back(TxFlag::invalid_mvcc); break;
    }
  }
  auto txs = sign_plans(plans, settings_.parallel_signing);
  const auto& o = net_.orderer();
  g.block = build_signed_block(number_, prev_hash_, std::move(txs), o.key, o.cert);
  prev_hash_ = block_digest(g.block);
  for (const auto& [k, v] : block_writes_) committed_[k] = v;
  ++number_;
  return g;
}

}  // namespace bmac
