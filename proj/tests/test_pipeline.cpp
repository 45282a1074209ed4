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
#include <functional>

#include "bmac/error.hpp"
#include "support.hpp"

using namespace bmac;
using namespace std::chrono_literals;

namespace {

const Network& net() { return test::four_org_network(); }

const Identity& owner(const Network& n, const Bytes& cert) {
  for (const auto& id : n.identities()) {
    if (id.cert == cert) return id;
  }
  throw std::logic_error("certificate not in network");
}

// Applies `edit` to every transaction, then re-signs clients and the block.
Block rework(const Block& b, const std::function<void(Transaction&)>& edit) {
  std::vector<Transaction> txs;
  for (auto tx : b.transactions) {
    edit(tx);
    txs.push_back(client_sign(std::move(tx), owner(net(), tx.creator_cert).key));
  }
  return build_signed_block(b.number(), b.header.prev_hash, std::move(txs), net().orderer().key,
                            net().orderer().cert);
}

Bytes bad_endorsement(const Bytes& cert) {
  Hash32 wrong{};
  wrong[0] = 1;
  return sign(wrong, owner(net(), cert).key);
}

ValidatorRun run(const std::vector<Block>& blocks, unsigned lanes, unsigned engines,
                 std::shared_ptr<VerifyEngine> engine = nullptr) {
  const Network& n = net();
  InProcessOptions o;
  o.pipeline.lanes = lanes;
  o.pipeline.engines_per_vscc = engines;
  o.engine = std::move(engine);
  return run_in_process(n, encode_stream(n, blocks).datagrams, o);
}

void expect_matches_oracle(const std::vector<Block>& blocks, const ValidatorRun& got) {
  auto want = run_oracle(net(), blocks);
  auto m = compare_results(want.results, got.results);
  for (const auto& x : m) ADD_FAILURE() << describe(x);
  auto s = compare_states(want.state, got.state);
  for (const auto& x : s) ADD_FAILURE() << describe(x);
}

}  // namespace

TEST(Config, ZeroLanesOrEnginesRejected) {
  PipelineConfig c;
  c.lanes = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.lanes = 1;
  c.engines_per_vscc = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ShortCircuit, TwoOfThreeStopsAfterTwo) {
  auto blocks = test::honest_blocks(net(), test::kTwoOfThree, 2, 12, 3);
  for (unsigned engines : {1u, 2u}) {
    auto r = run(blocks, 4, engines);
    ASSERT_EQ(r.results.size(), 2u);
    for (const auto& res : r.results) {
      EXPECT_EQ(std::count(res.flags.begin(), res.flags.end(), TxFlag::valid), 12);
      for (auto n : res.stats.tx_endorsement_verifications) EXPECT_EQ(n, 2) << "engines " << engines;
    }
    EXPECT_EQ(r.pipeline.endorsement_verifications, 2u * 24);
  }
  auto oracle = run_oracle(net(), blocks);
  EXPECT_EQ(oracle.totals.endorsement_verifications, 3u * 24);
}

TEST(ShortCircuit, ThreeOfThreeNeedsAll) {
  auto blocks = test::honest_blocks(net(), test::kThreeOfThree, 1, 10, 3);
  auto r = run(blocks, 2, 2);
  ASSERT_EQ(r.results.size(), 1u);
  for (auto n : r.results[0].stats.tx_endorsement_verifications) EXPECT_EQ(n, 3);
  EXPECT_EQ(run_oracle(net(), blocks).totals.endorsement_verifications, 30u);
}

TEST(ShortCircuit, WavesFollowEngineCount) {
  // Two engines need a second wave for the third endorsement; three do not.
  auto blocks = test::honest_blocks(net(), test::kThreeOfThree, 1, 8, 3);
  auto engine = std::make_shared<SyntheticEngine>(3ms, crypto_verdicts());
  auto median_vscc = [&](unsigned engines) {
    auto r = run(blocks, 1, engines, engine);
    auto v = r.results.at(0).stats.tx_vscc_us;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  float two = median_vscc(2);
  float three = median_vscc(3);
  EXPECT_GE(two, 6000.0f);
  EXPECT_LT(three, 6000.0f);
  EXPECT_GE(three, 3000.0f);
}

TEST(EarlyAbort, BadOrdererSignatureCostsOneVerification) {
  auto b = test::honest_blocks(net(), test::kTwoOfTwo, 1, 20, 2).front();
  Hash32 wrong{};
  b.metadata.orderer_signature = sign(wrong, net().orderer().key);
  auto r = run({b}, 4, 2);
  ASSERT_EQ(r.results.size(), 1u);
  const auto& res = r.results[0];
  EXPECT_FALSE(res.block_valid);
  EXPECT_EQ(res.stats.block_verifications + res.stats.tx_verifications + res.stats.endorsement_verifications, 1u);
  EXPECT_TRUE(std::all_of(res.flags.begin(), res.flags.end(),
                          [](TxFlag f) { return f == TxFlag::skipped_block_invalid; }));
  EXPECT_TRUE(r.state.empty());
  expect_matches_oracle({b}, r);
}

TEST(Vscc, InvalidOnlyEndorsementIsPolicyFailure) {
  auto base = test::honest_blocks(net(), test::kOneOfOne, 1, 3, 1).front();
  auto b = rework(base, [](Transaction& tx) {
    tx.endorsements[0].signature = bad_endorsement(tx.endorsements[0].endorser_cert);
  });
  auto r = run({b}, 1, 2);
  ASSERT_EQ(r.results.size(), 1u);
  for (auto f : r.results[0].flags) EXPECT_EQ(f, TxFlag::invalid_policy);
  for (auto n : r.results[0].stats.tx_endorsement_verifications) EXPECT_EQ(n, 1);
  expect_matches_oracle({b}, r);
}

TEST(Vscc, InvalidEndorsementLeavesPolicyToTheOthers) {
  // 2of3 with the first endorsement bad: the remaining two still satisfy it.
  auto base = test::honest_blocks(net(), test::kTwoOfThree, 1, 6, 3).front();
  auto b = rework(base, [](Transaction& tx) {
    tx.endorsements[0].signature = bad_endorsement(tx.endorsements[0].endorser_cert);
  });
  auto r = run({b}, 2, 1);
  for (auto f : r.results.at(0).flags) EXPECT_EQ(f, TxFlag::valid);
  for (auto n : r.results.at(0).stats.tx_endorsement_verifications) EXPECT_EQ(n, 3);
  expect_matches_oracle({b}, r);
}

TEST(Vscc, BadClientSignatureSkipsEndorsements) {
  auto b = test::honest_blocks(net(), test::kTwoOfTwo, 1, 4, 2).front();
  b.transactions[1].client_signature = Bytes{0x30, 0x03, 0x02, 0x01, 0x00};
  b.transactions[2].client_signature = b.transactions[3].client_signature;
  b = build_signed_block(b.number(), b.header.prev_hash, b.transactions, net().orderer().key, net().orderer().cert);
  auto r = run({b}, 4, 2);
  const auto& res = r.results.at(0);
  EXPECT_EQ(res.flags, (std::vector<TxFlag>{TxFlag::valid, TxFlag::invalid_sig, TxFlag::invalid_sig, TxFlag::valid}));
  EXPECT_EQ(res.stats.tx_endorsement_verifications, (std::vector<std::uint8_t>{2, 0, 0, 2}));
  expect_matches_oracle({b}, r);
}

TEST(Mvcc, IntraBlockConflictInvalidatesLaterReader) {
  auto b = test::honest_blocks(net(), test::kOneOfOne, 1, 3, 1).front();
  auto key = b.transactions[0].payload.writes.at(0).key;
  // Tx 2 expects the key absent although tx 0 writes it first. Endorsements
  // cover the payload, so they are refreshed after the edit.
  b = rework(b, [&, n = 0](Transaction& tx) mutable {
    if (n++ != 2) return;
    tx.payload.reads.push_back({key, Version{}});
    for (auto& e : tx.endorsements) e = endorse(tx.payload, owner(net(), e.endorser_cert).key, e.endorser_cert);
  });
  auto r = run({b}, 4, 2);
  const auto& flags = r.results.at(0).flags;
  EXPECT_EQ(flags[0], TxFlag::valid);
  EXPECT_EQ(flags[2], TxFlag::invalid_mvcc);
  expect_matches_oracle({b}, r);
}

TEST(Mvcc, StaleVersionsAcrossBlocks) {
  WorkloadSettings ws;
  ws.accounts = 60;
  ws.conflict_rate = 0.3;
  ws.chaincodes = {test::kOneOfOne};
  ws.endorsements_per_tx = 1;
  WorkloadGenerator gen(net(), ws, 99);
  std::vector<Block> blocks;
  std::vector<std::vector<TxFlag>> intended;
  for (int i = 0; i < 6; ++i) {
    auto g = gen.next(12);
    blocks.push_back(g.block);
    intended.push_back(g.intended);
  }
  auto r = run(blocks, 4, 2);
  ASSERT_EQ(r.results.size(), blocks.size());
  std::size_t conflicts = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    EXPECT_EQ(r.results[i].flags, intended[i]);
    conflicts += static_cast<std::size_t>(std::count(intended[i].begin(), intended[i].end(), TxFlag::invalid_mvcc));
  }
  EXPECT_GT(conflicts, 0u);
  expect_matches_oracle(blocks, r);
}

TEST(Mvcc, CapacityExceededMatchesOracle) {
  // A validated config keeps the keyspace within capacity, so the small
  // store is wired up by hand.
  constexpr std::size_t kCap = 50;
  auto blocks = test::honest_blocks(net(), test::kOneOfOne, 4, 20, 1);
  auto cache = net().make_cache(true);
  FifoSet fifos;
  for (const auto& b : blocks) emit(reference_entries(b, *cache), fifos);
  KvStore store(kCap);
  ResultMailbox box(8);
  Pipeline p(fifos, store, net().policies(), box, PipelineConfig{});
  p.start();
  p.finish();
  std::vector<ValidationResult> got;
  while (auto r = box.get_block_data()) got.push_back(std::move(*r));

  ReferenceValidator oracle(net().org_names(), net().policies(), kCap);
  KvStore::Snapshot state;
  std::vector<OracleResult> want;
  for (const auto& b : blocks) want.push_back(oracle.validate(b, state));

  EXPECT_TRUE(std::any_of(got.begin(), got.end(),
                          [](const auto& x) { return x.status == BlockStatus::capacity_exceeded; }));
  EXPECT_LE(store.size(), kCap);
  for (const auto& m : compare_results(want, got)) ADD_FAILURE() << describe(m);
  for (const auto& m : compare_states(state, store.snapshot())) ADD_FAILURE() << describe(m);
}

TEST(Ordering, MixedWorkloadAcrossLaneCounts) {
  WorkloadSettings ws;
  ws.accounts = 400;
  ws.invalid_sig_rate = 0.1;
  ws.unsatisfiable_rate = 0.1;
  ws.conflict_rate = 0.1;
  ws.endorsements_per_tx = 3;
  WorkloadGenerator gen(net(), ws, 7);
  std::vector<Block> blocks;
  for (std::size_t size : {1, 40, 7, 64, 2}) blocks.push_back(gen.next(size).block);
  for (unsigned lanes : {1u, 4u, 16u}) {
    SCOPED_TRACE(lanes);
    auto r = run(blocks, lanes, 2);
    expect_matches_oracle(blocks, r);
    for (std::size_t i = 0; i < r.results.size(); ++i) EXPECT_EQ(r.results[i].block_num, blocks[i].number());
  }
}

TEST(Mailbox, StalledConsumerBlocksPublisher) {
  auto blocks = test::honest_blocks(net(), test::kOneOfOne, 4, 2, 1);
  auto cache = net().make_cache(true);
  FifoSet fifos;
  for (const auto& b : blocks) emit(reference_entries(b, *cache), fifos);
  KvStore store;
  ResultMailbox box(1);
  PipelineConfig pc;
  Pipeline p(fifos, store, net().policies(), box, pc);
  p.start();
  while (box.blocked_publishers() == 0) std::this_thread::sleep_for(1ms);
  EXPECT_EQ(box.unread(), 1u);
  EXPECT_EQ(box.published(), 1u);
  std::vector<std::uint64_t> got;
  std::thread consumer([&] {
    while (auto r = box.get_block_data()) got.push_back(r->block_num);
  });
  p.finish();
  consumer.join();
  EXPECT_EQ(got, (std::vector<std::uint64_t>{1, 2, 3, 4}));
  EXPECT_EQ(box.max_unread(), 1u);
  EXPECT_GE(p.counters().stalled_publishes, 1u);
}
