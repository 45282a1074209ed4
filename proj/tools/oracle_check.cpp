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

// Replays dumped blocks through the sequential reference validator and
// diffs the outcome against a validator's results file.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "bmac/baseline_codec.hpp"
#include "bmac/config.hpp"
#include "bmac/error.hpp"
#include "bmac/harness.hpp"

using namespace bmac;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Reference comparison"};
  std::string config_path, blocks_dir, results_path, state_path;
  std::size_t max_report = 50;
  app.add_option("--config", config_path, "Network YAML")->required()->check(CLI::ExistingFile);
  app.add_option("--blocks", blocks_dir, "Directory written by orderer --baseline-dump")
      ->required()
      ->check(CLI::ExistingDirectory);
  app.add_option("--results", results_path, "Validator results (JSON lines)")->required()->check(CLI::ExistingFile);
  app.add_option("--state", state_path, "Validator state dump to compare as well");
  app.add_option("--max-report", max_report, "Mismatches to print");
  CLI11_PARSE(app, argc, argv);

  try {
    Network net(NetworkConfig::load(config_path));
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(blocks_dir)) {
      if (e.path().extension() == ".bin") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Block> blocks;
    for (const auto& f : files) {
      std::ifstream in(f, std::ios::binary);
      Bytes bytes((std::istreambuf_iterator<char>(in)), {});
      blocks.push_back(decode_baseline(bytes));
    }
    std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return a.number() < b.number(); });

    auto oracle = run_oracle(net, blocks);
    auto results = read_results(results_path);
    auto mismatches = compare_results(oracle.results, results);
    std::size_t state_diffs = 0;
    if (!state_path.empty()) {
      auto diffs = compare_states(oracle.state, read_dump(state_path));
      state_diffs = diffs.size();
      mismatches.insert(mismatches.end(), diffs.begin(), diffs.end());
    }

    std::size_t txs = 0;
    for (const auto& r : oracle.results) txs += r.flags.size();
    for (std::size_t i = 0; i < mismatches.size() && i < max_report; ++i) std::cout << describe(mismatches[i]) << '\n';
    if (mismatches.size() > max_report) std::cout << "... " << mismatches.size() - max_report << " more\n";
    std::cout << "oracle-check: " << blocks.size() << " blocks, " << txs << " txs, " << results.size()
              << " results, " << mismatches.size() << " mismatches";
    if (!state_path.empty()) std::cout << " (" << state_diffs << " in state)";
    std::cout << '\n';
    return mismatches.empty() ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "oracle-check: " << e.what() << '\n';
    return 1;
  }
}
