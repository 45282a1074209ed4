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

// Receives blocks over UDP, validates them and writes one JSON line per
// block plus a CSV summary.

#include <atomic>
#include <charconv>
#include <exception>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "bmac/config.hpp"
#include "bmac/error.hpp"
#include "bmac/harness.hpp"
#include "bmac/pipeline.hpp"
#include "bmac/receiver.hpp"
#include "bmac/udp.hpp"

using namespace bmac;
using namespace std::chrono_literals;

namespace {

// "360us", "2ms", "500ns" or a bare number of microseconds.
std::chrono::microseconds parse_delay(const std::string& text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || v < 0) throw ConfigError("bad delay '" + text + "'");
  std::string unit(ptr, text.data() + text.size());
  double us = unit.empty() || unit == "us" ? v : unit == "ms" ? v * 1000 : unit == "ns" ? v / 1000 : -1;
  if (us < 0) throw ConfigError("bad delay unit '" + unit + "'");
  return std::chrono::microseconds(static_cast<long long>(us + 0.5));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validator peer"};
  std::string config_path, listen_text = ":5000", out_path, csv_path, state_path, delay_text, bypass_text;
  std::optional<unsigned> lanes, engines;
  std::size_t total_txs = 0;
  double idle_s = 5.0;
  bool per_tx = false;
  app.add_option("--config", config_path, "Network YAML")->required()->check(CLI::ExistingFile);
  app.add_option("--listen", listen_text, "UDP address to receive on, host:port or :port");
  app.add_option("--out", out_path, "Results file (JSON lines)")->required();
  app.add_option("--lanes", lanes, "Parallel transaction lanes");
  app.add_option("--engines", engines, "Verification engines per lane");
  app.add_option("--synthetic-delay", delay_text, "Fixed verification latency, e.g. 360us");
  app.add_option("--total-txs", total_txs, "Stop after this many transactions (default from config)");
  app.add_option("--idle-timeout", idle_s, "Stop when no datagram arrives for this many seconds");
  app.add_option("--csv", csv_path, "Summary CSV (default: <out>.csv)");
  app.add_option("--state-dump", state_path, "Write the final key-value state here");
  app.add_option("--bypass", bypass_text, "Forward non-protocol datagrams to host:port");
  app.add_flag("--per-tx-stats", per_tx, "Include per-transaction timings in the results");
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = NetworkConfig::load(config_path);
    if (lanes) cfg.pipeline.lanes = *lanes;
    if (engines) cfg.pipeline.engines_per_vscc = *engines;
    if (!delay_text.empty()) {
      auto d = parse_delay(delay_text);
      cfg.pipeline.synthetic_delay = d.count() > 0 ? std::optional(d) : std::nullopt;
    }
    cfg.pipeline.validate();
    if (!total_txs) {
      total_txs = cfg.workload.total_txs ? cfg.workload.total_txs : cfg.workload.blocks * cfg.workload.block_size;
    }
    if (csv_path.empty()) csv_path = out_path + ".csv";
    if (cfg.pipeline.synthetic_delay) tighten_timer_slack();

    Network net(cfg);
    auto listen = Endpoint::parse(listen_text);
    UdpSocket sock;
    sock.set_receive_buffer(32 << 20);
    sock.bind(listen);

    std::optional<UdpSocket> bypass_sock;
    std::optional<Endpoint> bypass_dest;
    if (!bypass_text.empty()) {
      bypass_dest = Endpoint::parse(bypass_text);
      bypass_sock.emplace();
    }

    auto cache = net.make_cache(false);
    FifoSet fifos(cfg.fifo_capacity);
    KvStore store(cfg.state_capacity);
    ResultMailbox mailbox(cfg.mailbox_depth);
    ReceiverOptions ro;
    ro.bmac_port = sock.local_port();
    ro.reassembly_deadline = cfg.protocol.reassembly_deadline;
    Receiver receiver(*cache, fifos, ro, [&](ByteView d, std::uint16_t) {
      if (bypass_sock) bypass_sock->send_to(d, *bypass_dest);
    });
    Pipeline pipeline(fifos, store, net.policies(), mailbox, cfg.pipeline);

    std::cerr << "validator: listening on " << listen.host << ':' << sock.local_port() << ", "
              << cfg.pipeline.lanes << " lanes x " << cfg.pipeline.engines_per_vscc << " engines"
              << (cfg.pipeline.synthetic_delay
                      ? ", synthetic " + std::to_string(cfg.pipeline.synthetic_delay->count()) + "us"
                      : std::string())
              << ", expecting " << total_txs << " txs\n";

    std::ofstream out(out_path);
    if (!out) throw Error("cannot open " + out_path);

    std::atomic<bool> stop{false};
    std::exception_ptr pipeline_error;
    // Owns the receiver; once input ends it drains the pipeline, which
    // closes the mailbox and ends the result loop below.
    std::thread rx_thread([&] {
      auto last = Clock::now();
      bool seen = false;
      while (!stop) {
        auto d = sock.receive(50ms);
        auto now = Clock::now();
        if (d) {
          receiver.ingest(d->bytes, d->dst_port, now);
          last = now;
          seen = true;
        } else if (seen && now - last > std::chrono::duration<double>(idle_s)) {
          break;
        }
        receiver.poll(now);
      }
      receiver.poll(Clock::now() + ro.reassembly_deadline);
      try {
        pipeline.finish();
      } catch (...) {
        pipeline_error = std::current_exception();
      }
    });

    pipeline.start();
    std::vector<ValidationResult> results;
    std::size_t committed = 0;
    while (auto r = mailbox.get_block_data()) {
      out << to_json_line(*r, per_tx) << '\n';
      committed += r->num_txs;
      results.push_back(std::move(*r));
      if (committed >= total_txs) stop = true;
    }
    rx_thread.join();
    if (pipeline_error) std::rethrow_exception(pipeline_error);
    out.flush();

    auto m = summarize(results);
    const auto& rc = receiver.counters();
    std::ofstream csv(csv_path);
    csv << csv_header() << ",incomplete_blocks,failed_blocks,malformed_packets\n"
        << csv_row("validator", m) << ',' << rc.incomplete_blocks << ',' << rc.failed_blocks << ','
        << rc.malformed_packets << '\n';
    if (!state_path.empty()) store.dump(state_path);

    std::cerr << "validator: " << m.blocks << " blocks, " << m.txs << " txs (" << m.valid_txs << " valid) in "
              << m.seconds << " s, " << m.throughput_tps << " tps, latency p50 " << m.latency_p50_ms
              << " ms; incomplete blocks " << rc.incomplete_blocks << ", failed blocks " << rc.failed_blocks
              << '\n';
  } catch (const Error& e) {
    std::cerr << "validator: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
