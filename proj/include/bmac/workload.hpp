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
#include <random>
#include <string>
#include <vector>

#include "bmac/block.hpp"
#include "bmac/config.hpp"
#include "bmac/results.hpp"

namespace bmac {

enum class Injection : std::uint8_t { none, invalid_sig, unsatisfiable, conflict };

struct GeneratedBlock {
  Block block;
  std::vector<Injection> injections;
  std::vector<TxFlag> intended;  // what a correct validator must produce
};

enum class ClientSigMode : std::uint8_t { honest, wrong_digest, bad_der };

/// An unsigned transaction and who signs what.
struct TxPlan {
  Transaction tx;
  const Identity* client = nullptr;
  std::vector<const Identity*> endorsers;
  std::vector<bool> corrupt;  // per endorser: sign the wrong message
  ClientSigMode client_mode = ClientSigMode::honest;
};

void sign_plan(TxPlan& plan);
/// Signs every plan; the parallel path spreads plans over OpenMP threads
/// and produces the same bytes as the serial one.
std::vector<Transaction> sign_plans(std::vector<TxPlan>& plans, bool parallel);

/// Deterministic block stream for a network. Tracks the committed version
/// of every key so reads carry the versions an endorser would have seen.
class WorkloadGenerator {
 public:
  WorkloadGenerator(const Network& net, WorkloadSettings settings, std::uint64_t seed);

  GeneratedBlock next() { return next(settings_.block_size); }
  GeneratedBlock next(std::size_t size);

  std::uint64_t next_block_number() const { return number_; }
  const std::map<std::string, Version>& versions() const { return committed_; }
  const WorkloadSettings& settings() const { return settings_; }

 private:
  std::string draw_account();
  Version committed(const std::string& key) const;
  TxPlan plan_tx(std::uint32_t tx_num, Injection inj);

  const Network& net_;
  WorkloadSettings settings_;
  std::mt19937_64 rng_;
  std::uint64_t number_ = 1;
  Hash32 prev_hash_{};
  std::vector<std::uint32_t> perm_;
  std::size_t perm_pos_ = 0;
  std::vector<std::uint16_t> chaincodes_;
  std::vector<const Identity*> clients_;
  std::map<std::string, Version> committed_;
  std::map<std::string, Version> block_writes_;
};

std::string account_key(std::uint32_t index);

}  // namespace bmac
