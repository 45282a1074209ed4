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

#include "bmac/results.hpp"

#include <array>
#include <fstream>

#include "bmac/error.hpp"
#include "json.hpp"

namespace bmac {
namespace {

constexpr std::array<std::string_view, 5> kFlagNames = {"valid", "invalid_sig", "invalid_policy", "invalid_mvcc",
                                                        "skipped_block_invalid"};
constexpr std::array<std::string_view, 3> kStatusNames = {"ok", "capacity_exceeded", "incomplete"};

}  // namespace

std::string_view flag_name(TxFlag f) { return kFlagNames.at(static_cast<std::size_t>(f)); }

TxFlag parse_flag(std::string_view s) {
  for (std::size_t i = 0; i < kFlagNames.size(); ++i) {
    if (kFlagNames[i] == s) return static_cast<TxFlag>(i);
  }
  throw DecodeError("unknown tx flag " + std::string(s), 0);
}

std::string_view status_name(BlockStatus s) { return kStatusNames.at(static_cast<std::size_t>(s)); }

BlockStatus parse_status(std::string_view s) {
  for (std::size_t i = 0; i < kStatusNames.size(); ++i) {
    if (kStatusNames[i] == s) return static_cast<BlockStatus>(i);
  }
  throw DecodeError("unknown block status " + std::string(s), 0);
}

std::string to_json_line(const ValidationResult& r, bool per_tx_stats) {
  nlohmann::json flags = nlohmann::json::array();
  for (auto f : r.flags) flags.push_back(flag_name(f));
  const auto& s = r.stats;
  nlohmann::json stats = {
      {"block_verify_us", s.block_verify_us},
      {"tx_verify_us", s.tx_verify_us},
      {"vscc_us", s.vscc_us},
      {"mvcc_us", s.mvcc_us},
      {"block_verifications", s.block_verifications},
      {"tx_verifications", s.tx_verifications},
      {"endorsement_verifications", s.endorsement_verifications},
      {"tx_fifo_depth", s.tx_fifo_depth},
      {"ends_fifo_depth", s.ends_fifo_depth},
      {"collector_max_pending", s.collector_max_pending},
      {"latency_us", s.latency_us},
      {"started_ns", s.started_ns},
      {"finished_ns", s.finished_ns},
  };
  if (per_tx_stats) {
    stats["tx_vscc_us"] = s.tx_vscc_us;
    stats["tx_endorsement_verifications"] = s.tx_endorsement_verifications;
  }
  nlohmann::json j = {{"block", r.block_num},     {"block_valid", r.block_valid}, {"num_txs", r.num_txs},
                      {"status", status_name(r.status)}, {"flags", flags},            {"stats", stats}};
  return j.dump();
}

ValidationResult from_json_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("bad result line: ") + e.what(), 0);
  }
  try {
    ValidationResult r;
    r.block_num = j.at("block").get<std::uint64_t>();
    r.block_valid = j.at("block_valid").get<bool>();
    r.num_txs = j.at("num_txs").get<std::uint32_t>();
    r.status = parse_status(j.at("status").get<std::string>());
    for (const auto& f : j.at("flags")) r.flags.push_back(parse_flag(f.get<std::string>()));
    if (j.contains("stats")) {
      const auto& s = j["stats"];
      auto& o = r.stats;
      o.block_verify_us = s.value("block_verify_us", 0.0);
      o.tx_verify_us = s.value("tx_verify_us", 0.0);
      o.vscc_us = s.value("vscc_us", 0.0);
      o.mvcc_us = s.value("mvcc_us", 0.0);
      o.block_verifications = s.value("block_verifications", std::uint64_t{0});
      o.tx_verifications = s.value("tx_verifications", std::uint64_t{0});
      o.endorsement_verifications = s.value("endorsement_verifications", std::uint64_t{0});
      o.tx_fifo_depth = s.value("tx_fifo_depth", std::uint64_t{0});
      o.ends_fifo_depth = s.value("ends_fifo_depth", std::uint64_t{0});
      o.collector_max_pending = s.value("collector_max_pending", std::uint64_t{0});
      o.latency_us = s.value("latency_us", 0.0);
      o.started_ns = s.value("started_ns", std::int64_t{0});
      o.finished_ns = s.value("finished_ns", std::int64_t{0});
      if (s.contains("tx_vscc_us")) o.tx_vscc_us = s["tx_vscc_us"].get<std::vector<float>>();
      if (s.contains("tx_endorsement_verifications")) {
        o.tx_endorsement_verifications = s["tx_endorsement_verifications"].get<std::vector<std::uint8_t>>();
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("bad result line: ") + e.what(), 0);
  }
}

std::vector<ValidationResult> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<ValidationResult> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(from_json_line(line));
  }
  return out;
}

}  // namespace bmac
