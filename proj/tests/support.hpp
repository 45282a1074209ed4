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

#include <string>
#include <vector>

#include "bmac/config.hpp"
#include "bmac/harness.hpp"
#include "bmac/workload.hpp"

namespace bmac::test {

// cc ids of the policies in the shared four-org network.
inline constexpr std::uint16_t kOneOfOne = 1;
inline constexpr std::uint16_t kTwoOfTwo = 2;
inline constexpr std::uint16_t kTwoOfThree = 3;
inline constexpr std::uint16_t kThreeOfThree = 4;
inline constexpr std::uint16_t kThreeOfFour = 5;
inline constexpr std::uint16_t kComplex = 6;

inline constexpr const char* kComplexPolicy =
    "(Org1 & Org2) | (Org1 & Org4) | (Org2 & Org3) | (Org2 & Org4) | (Org3 & Org4)";

/// Orderer org plus Org1..Org4, each with a peer and a client, and one
/// chaincode per policy above.
std::string four_org_yaml(const std::string& workload = "");
NetworkConfig four_org_config(const std::string& workload = "");
/// Shared instance (key derivation is not free).
const Network& four_org_network();

/// Honest blocks for one chaincode.
std::vector<Block> honest_blocks(const Network& net, std::uint16_t cc_id, std::size_t blocks, std::size_t txs,
                                 std::size_t ends, std::uint64_t seed = 11);

}  // namespace bmac::test
