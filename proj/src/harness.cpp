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

#include "bmac/harness.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "bmac/baseline_codec.hpp"
#include "bmac/error.hpp"

namespace bmac {

OracleRun run_oracle(const Network& net, const std::vector<Block>& blocks, VerdictTable* record) {
  OracleRun run;
  ReferenceValidator v(net.org_names(), net.policies(), net.config().state_capacity);
  for (const auto& b : blocks) {
    auto r = v.validate(b, run.state, record);
    run.totals.block_verifications += r.counts.block_verifications;
    run.totals.tx_verifications += r.counts.tx_verifications;
    run.totals.endorsement_verifications += r.counts.endorsement_verifications;
    run.totals.policy_steps += r.counts.policy_steps;
    run.results.push_back(std::move(r));
  }
  return run;
}

EncodedStream encode_stream(const Network& net, const std::vector<Block>& blocks) {
  EncodedStream s;
  auto cache = net.make_cache(false);
  SenderOptions opts;
  opts.max_frame = net.config().protocol.max_frame;
  BmacSender sender(*cache, opts);
  for (const auto& b : blocks) {
    auto base = encode_baseline(b);
    s.baseline_bytes += base.size();
    s.identity_bytes += identity_bytes(base);
    for (auto& d : sender.encode(b)) {
      s.wire_bytes += d.size();
      s.datagrams.push_back(std::move(d));
    }
  }
  return s;
}

namespace {

template <typename Feed>
ValidatorRun run_with(const Network& net, const InProcessOptions& options, Feed feed) {
  ValidatorRun run;
  FifoSet fifos(options.fifo_capacity);
  KvStore store(net.config().state_capacity);
  ResultMailbox mailbox(options.mailbox_depth);
  Pipeline pipeline(fifos, store, net.policies(), mailbox, options.pipeline, options.engine);
  std::thread consumer([&] {
    while (auto r = mailbox.get_block_data()) run.results.push_back(std::move(*r));
  });
  pipeline.start();
  try {
    feed(fifos, run);
    pipeline.finish();
  } catch (...) {
    pipeline.stop();
    consumer.join();
    throw;
  }
  consumer.join();
  run.pipeline = pipeline.counters();
  run.state = store.snapshot();
  return run;
}

}  // namespace

ValidatorRun run_in_process(const Network& net, const std::vector<Bytes>& datagrams,
                            const InProcessOptions& options) {
  return run_with(net, options, [&](FifoSet& fifos, ValidatorRun& run) {
    auto cache = net.make_cache(false);
    ReceiverOptions ro;
    ro.bmac_port = net.config().protocol.port;
    ro.reassembly_deadline = net.config().protocol.reassembly_deadline;
    Receiver rx(*cache, fifos, ro);
    for (const auto& d : datagrams) rx.ingest(d, ro.bmac_port);
    rx.poll(Clock::now() + ro.reassembly_deadline);
    run.receiver = rx.counters();
  });
}

ValidatorRun run_prefilled(const Network& net, const std::vector<BlockEntries>& entries,
                           const InProcessOptions& options) {
  InProcessOptions opts = options;
  opts.fifo_capacity = kUnbounded;
  ValidatorRun run;
  FifoSet fifos(kUnbounded);
  KvStore store(net.config().state_capacity);
  ResultMailbox mailbox(opts.mailbox_depth);
  auto now = Clock::now();
  for (auto e : entries) {
    e.block.emitted_at = now;
    emit(e, fifos);
  }
  Pipeline pipeline(fifos, store, net.policies(), mailbox, opts.pipeline, opts.engine);
  std::thread consumer([&] {
    while (auto r = mailbox.get_block_data()) run.results.push_back(std::move(*r));
  });
  pipeline.start();
  try {
    pipeline.finish();
  } catch (...) {
    consumer.join();
    throw;
  }
  consumer.join();
  run.pipeline = pipeline.counters();
  run.state = store.snapshot();
  return run;
}

std::vector<Mismatch> compare_results(const std::vector<OracleResult>& expected,
                                      const std::vector<ValidationResult>& actual) {
  std::vector<Mismatch> out;
  std::size_t i = 0, j = 0;
  while (i < expected.size() || j < actual.size()) {
    if (j == actual.size() || (i < expected.size() && expected[i].block_num < actual[j].block_num)) {
      out.push_back({expected[i].block_num, -1, "missing result"});
      ++i;
      continue;
    }
    if (i == expected.size() || actual[j].block_num < expected[i].block_num) {
      out.push_back({actual[j].block_num, -1, "unexpected result"});
      ++j;
      continue;
    }
    const auto& e = expected[i];
    const auto& a = actual[j];
    if (e.block_valid != a.block_valid) out.push_back({e.block_num, -1, "block_valid differs"});
    if (e.status != a.status) {
      out.push_back({e.block_num, -1,
                     "status " + std::string(status_name(a.status)) + ", expected " +
                         std::string(status_name(e.status))});
    }
    if (e.flags.size() != a.flags.size()) {
      out.push_back({e.block_num, -1, "tx count differs"});
    } else {
      for (std::size_t t = 0; t < e.flags.size(); ++t) {
        if (e.flags[t] != a.flags[t]) {
          out.push_back({e.block_num, static_cast<std::int64_t>(t),
                         std::string(flag_name(a.flags[t])) + ", expected " + std::string(flag_name(e.flags[t]))});
        }
      }
    }
    ++i;
    ++j;
  }
  return out;
}

std::vector<Mismatch> compare_states(const KvStore::Snapshot& expected, const KvStore::Snapshot& actual) {
  std::vector<Mismatch> out;
  for (const auto& [k, v] : expected) {
    auto it = actual.find(k);
    if (it == actual.end()) {
      out.push_back({0, -1, "state: key " + k + " missing"});
    } else if (it->second != v) {
      out.push_back({0, -1, "state: key " + k + " differs"});
    }
  }
  for (const auto& [k, v] : actual) {
    if (!expected.contains(k)) out.push_back({0, -1, "state: unexpected key " + k});
  }
  return out;
}

std::string describe(const Mismatch& m) {
  std::ostringstream os;
  os << "block " << m.block;
  if (m.tx >= 0) os << " tx " << m.tx;
  os << ": " << m.what;
  return os.str();
}

RunMetrics summarize(const std::vector<ValidationResult>& results) {
  RunMetrics m;
  if (results.empty()) return m;
  std::int64_t first = results.front().stats.started_ns, last = results.front().stats.finished_ns;
  std::vector<double> lat;
  for (const auto& r : results) {
    ++m.blocks;
    m.txs += r.num_txs;
    m.valid_txs += static_cast<std::uint64_t>(std::count(r.flags.begin(), r.flags.end(), TxFlag::valid));
    first = std::min(first, r.stats.started_ns);
    last = std::max(last, r.stats.finished_ns);
    lat.push_back(r.stats.latency_us / 1000.0);
    m.block_verifications += r.stats.block_verifications;
    m.tx_verifications += r.stats.tx_verifications;
    m.endorsement_verifications += r.stats.endorsement_verifications;
  }
  m.seconds = static_cast<double>(last - first) / 1e9;
  m.throughput_tps = m.seconds > 0 ? static_cast<double>(m.txs) / m.seconds : 0;
  std::sort(lat.begin(), lat.end());
  auto pct = [&](double q) { return lat[std::min(lat.size() - 1, static_cast<std::size_t>(q * static_cast<double>(lat.size())))]; };
  m.latency_p50_ms = pct(0.5);
  m.latency_p99_ms = pct(0.99);
  double sum = 0;
  for (double v : lat) sum += v;
  m.latency_mean_ms = sum / static_cast<double>(lat.size());
  return m;
}

std::string csv_header() {
  return "label,blocks,txs,valid_txs,seconds,throughput_tps,latency_p50_ms,latency_p99_ms,latency_mean_ms,"
         "block_verifications,tx_verifications,endorsement_verifications";
}

std::string csv_row(const std::string& label, const RunMetrics& m) {
  std::ostringstream os;
  os << label << ',' << m.blocks << ',' << m.txs << ',' << m.valid_txs << ',' << m.seconds << ','
     << m.throughput_tps << ',' << m.latency_p50_ms << ',' << m.latency_p99_ms << ',' << m.latency_mean_ms << ','
     << m.block_verifications << ',' << m.tx_verifications << ',' << m.endorsement_verifications;
  return os.str();
}

}  // namespace bmac
