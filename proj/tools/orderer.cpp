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

// Generates a signed block stream from the network config and sends it to a
// validator over UDP.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "bmac/baseline_codec.hpp"
#include "bmac/config.hpp"
#include "bmac/error.hpp"
#include "bmac/sender.hpp"
#include "bmac/workload.hpp"
#include "json.hpp"

using namespace bmac;

int main(int argc, char** argv) {
  CLI::App app{"Block sender"};
  std::string config_path, dest_text, dump_dir, summary_path;
  std::size_t blocks = 0, block_size = 0;
  std::uint64_t seed = 0;
  long gap_us = 2000;
  bool pregenerate = false;
  app.add_option("--config", config_path, "Network YAML")->required()->check(CLI::ExistingFile);
  app.add_option("--blocks", blocks, "Blocks to send (default: workload.blocks)");
  app.add_option("--block-size", block_size, "Transactions per block (default: workload.block_size)");
  app.add_option("--dest", dest_text, "Validator address host:port")->required();
  app.add_option("--baseline-dump", dump_dir, "Also write each block's baseline encoding here");
  app.add_option("--seed", seed, "Workload seed (default: config seed)");
  app.add_option("--gap-us", gap_us, "Pause between blocks, microseconds")->check(CLI::NonNegativeNumber);
  app.add_option("--summary", summary_path, "Write the send summary as JSON");
  app.add_flag("--pregenerate", pregenerate, "Sign every block before sending the first one");
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = NetworkConfig::load(config_path);
    if (blocks) cfg.workload.blocks = blocks;
    if (block_size) cfg.workload.block_size = block_size;
    if (block_size > kDefaultMaxBlockTxs) throw RangeError("--block-size above " + std::to_string(kDefaultMaxBlockTxs));
    Network net(cfg);
    const auto dest = Endpoint::parse(dest_text);
    if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);

    WorkloadGenerator gen(net, cfg.workload, seed ? seed : cfg.seed);
    auto cache = net.make_cache(false);
    SenderOptions so;
    so.max_frame = cfg.protocol.max_frame;
    BmacSender sender(*cache, so);
    UdpSocket sock;

    std::size_t txs = 0, packets = 0, wire = 0, baseline = 0, identity = 0;
    std::vector<Block> ready;
    if (pregenerate) {
      for (std::size_t i = 0; i < cfg.workload.blocks; ++i) ready.push_back(gen.next().block);
    }
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < cfg.workload.blocks; ++i) {
      Block block = pregenerate ? std::move(ready[i]) : gen.next().block;
      auto base = encode_baseline(block);
      baseline += base.size();
      identity += identity_bytes(base);
      if (!dump_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof name, "block_%08llu.bin", static_cast<unsigned long long>(block.number()));
        std::ofstream out(std::filesystem::path(dump_dir) / name, std::ios::binary);
        out.write(reinterpret_cast<const char*>(base.data()), static_cast<std::streamsize>(base.size()));
      }
      auto report = sender.send_block(block, sock, dest);
      packets += report.packets;
      wire += report.wire_bytes;
      txs += block.transactions.size();
      if (gap_us > 0) std::this_thread::sleep_for(std::chrono::microseconds(gap_us));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json s = {
        {"blocks", cfg.workload.blocks},
        {"txs", txs},
        {"packets", packets},
        {"wire_bytes", wire},
        {"baseline_bytes", baseline},
        {"identity_bytes", identity},
        {"bandwidth_ratio", wire ? static_cast<double>(baseline) / static_cast<double>(wire) : 0.0},
        {"identity_share", baseline ? static_cast<double>(identity) / static_cast<double>(baseline) : 0.0},
        {"seconds", secs},
    };
    std::cout << s.dump() << std::endl;
    if (!summary_path.empty()) std::ofstream(summary_path) << s.dump(2) << '\n';
  } catch (const Error& e) {
    std::cerr << "orderer: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
