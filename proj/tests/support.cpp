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

#include "support.hpp"

namespace bmac::test {

std::string four_org_yaml(const std::string& workload) {
  std::string y = R"Y(seed: 20240501
orgs:
  - name: OrdererOrg
    nodes: [{role: orderer, seq: 0}]
  - name: Org1
    nodes: [{role: peer, seq: 0}, {role: client, seq: 0}]
  - name: Org2
    nodes: [{role: peer, seq: 0}, {role: client, seq: 0}]
  - name: Org3
    nodes: [{role: peer, seq: 0}, {role: client, seq: 0}]
  - name: Org4
    nodes: [{role: peer, seq: 0}, {role: client, seq: 0}]
chaincodes:
  - {id: 1, name: one_of_one, policy: "Org1"}
  - {id: 2, name: two_of_two, policy: "Org1 & Org2"}
  - {id: 3, name: two_of_three, policy: "2-outof-3 orgs"}
  - {id: 4, name: three_of_three, policy: "3-outof-3 orgs"}
  - {id: 5, name: three_of_four, policy: "3-outof-4 orgs"}
  - {id: 6, name: complex, policy: "(Org1 & Org2) | (Org1 & Org4) | (Org2 & Org3) | (Org2 & Org4) | (Org3 & Org4)"}
state: {capacity: 8192}
)Y";
  if (!workload.empty()) y += "workload: " + workload + "\n";
  return y;
}

NetworkConfig four_org_config(const std::string& workload) { return NetworkConfig::parse(four_org_yaml(workload)); }

const Network& four_org_network() {
  static const Network net(four_org_config());
  return net;
}

std::vector<Block> honest_blocks(const Network& net, std::uint16_t cc_id, std::size_t blocks, std::size_t txs,
                                 std::size_t ends, std::uint64_t seed) {
  WorkloadSettings ws;
  ws.accounts = 4000;
  ws.chaincodes = {cc_id};
  ws.endorsements_per_tx = ends;
  WorkloadGenerator gen(net, ws, seed);
  std::vector<Block> out;
  for (std::size_t i = 0; i < blocks; ++i) out.push_back(gen.next(txs).block);
  return out;
}

}  // namespace bmac::test
