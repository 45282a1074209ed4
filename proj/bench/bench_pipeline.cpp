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

// Pipeline against the sequential reference on the same blocks.

#include <benchmark/benchmark.h>

#include "bmac/config.hpp"
#include "bmac/harness.hpp"
#include "bmac/workload.hpp"

using namespace bmac;
using namespace std::chrono_literals;

namespace {

const char* kNetwork = R"Y(seed: 42
orgs:
  - name: OrdererOrg
    nodes: [{role: orderer, seq: 0}]
  - name: Org1
    nodes: [{role: peer, seq: 0}, {role: client, seq: 0}]
  - name: Org2
    nodes: [{role: peer, seq: 0}, {role: client, seq: 0}]
  - name: Org3
    nodes: [{role: peer, seq: 0}, {role: client, seq: 0}]
chaincodes:
  - {id: 1, name: two_of_two, policy: "2-outof-2 orgs"}
  - {id: 2, name: two_of_three, policy: "2-outof-3 orgs"}
workload: {block_size: 100, endorsements_per_tx: 3, accounts: 4000}
)Y";

struct Fixture {
  Network net{NetworkConfig::parse(kNetwork)};
  std::vector<Block> blocks;
  std::vector<BlockEntries> entries;
  std::shared_ptr<VerdictTable> table = std::make_shared<VerdictTable>();

  Fixture() {
    WorkloadGenerator gen(net, net.config().workload, 1);
    for (int i = 0; i < 20; ++i) blocks.push_back(gen.next().block);
    run_oracle(net, blocks, table.get());
    auto cache = net.make_cache(true);
    for (const auto& b : blocks) entries.push_back(reference_entries(b, *cache));
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

std::size_t tx_count() {
  std::size_t n = 0;
  for (const auto& b : fixture().blocks) n += b.transactions.size();
  return n;
}

void BM_Reference(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(run_oracle(f.net, f.blocks));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * tx_count()));
}
BENCHMARK(BM_Reference)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PipelineCrypto(benchmark::State& state) {
  auto& f = fixture();
  InProcessOptions o;
  o.pipeline.lanes = static_cast<unsigned>(state.range(0));
  o.mailbox_depth = 4;
  for (auto _ : state) benchmark::DoNotOptimize(run_prefilled(f.net, f.entries, o));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * tx_count()));
}
BENCHMARK(BM_PipelineCrypto)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

// Fixed 360 us per verification with verdicts from the reference run.
void BM_PipelineSynthetic(benchmark::State& state) {
  auto& f = fixture();
  InProcessOptions o;
  o.pipeline.lanes = static_cast<unsigned>(state.range(0));
  o.pipeline.engines_per_vscc = static_cast<unsigned>(state.range(1));
  o.engine = std::make_shared<SyntheticEngine>(360us, table_verdicts(f.table));
  o.mailbox_depth = 4;
  for (auto _ : state) benchmark::DoNotOptimize(run_prefilled(f.net, f.entries, o));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * tx_count()));
}
BENCHMARK(BM_PipelineSynthetic)
    ->Args({4, 2})
    ->Args({8, 2})
    ->Args({16, 2})
    ->Args({5, 3})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_SignBlocks(benchmark::State& state) {
  auto& f = fixture();
  WorkloadSettings ws = f.net.config().workload;
  ws.parallel_signing = state.range(0) != 0;
  for (auto _ : state) {
    WorkloadGenerator gen(f.net, ws, 9);
    benchmark::DoNotOptimize(gen.next());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * ws.block_size));
}
BENCHMARK(BM_SignBlocks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
