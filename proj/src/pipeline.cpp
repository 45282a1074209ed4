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

#include "bmac/pipeline.hpp"

#include <algorithm>
#include <map>

#include "bmac/error.hpp"

namespace bmac {
namespace {

double micros(Clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); }

std::int64_t stamp(Clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count();
}

}  // namespace

/// Counting gate on blocks between block_verify and publication.
class Pipeline::InFlight {
 public:
  explicit InFlight(unsigned limit) : free_(limit) {}

  bool acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return free_ > 0 || closed_; });
    if (closed_) return false;
    --free_;
    return true;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
    }
    cv_.notify_one();
  }
  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  unsigned free_;
  bool closed_ = false;
};

void PipelineConfig::validate() const {
  if (lanes == 0) throw ConfigError("pipeline needs at least one lane");
  if (engines_per_vscc == 0) throw ConfigError("pipeline needs at least one engine per vscc");
  if (max_blocks_in_flight == 0) throw ConfigError("max_blocks_in_flight must be positive");
}

Pipeline::Pipeline(FifoSet& fifos, KvStore& store, const PolicyTable& policies, ResultMailbox& results,
                   PipelineConfig config, std::shared_ptr<VerifyEngine> engine)
    : fifos_(fifos),
      store_(store),
      policies_(policies),
      results_(results),
      config_(config),
      engine_(std::move(engine)) {
  config_.validate();
  if (!engine_) {
    if (config_.synthetic_delay) {
      engine_ = std::make_shared<SyntheticEngine>(*config_.synthetic_delay, crypto_verdicts());
    } else {
      engine_ = std::make_shared<CryptoEngine>();
    }
  }
  in_flight_ = std::make_unique<InFlight>(config_.max_blocks_in_flight);
}

Pipeline::~Pipeline() { stop(); }

void Pipeline::start() {
  if (started_) return;
  started_ = true;
  lanes_running_ = config_.lanes;
  threads_.emplace_back([this] { block_verify_loop(); });
  for (unsigned i = 0; i < config_.lanes; ++i) threads_.emplace_back([this] { lane_loop(); });
  threads_.emplace_back([this] { collector_loop(); });
  threads_.emplace_back([this] { mvcc_loop(); });
}

void Pipeline::finish() {
  fifos_.close();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  results_.close();
  std::lock_guard lock(error_mu_);
  if (error_) std::rethrow_exception(error_);
}

void Pipeline::stop() {
  close_all();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
}

void Pipeline::close_all() {
  fifos_.close();
  in_flight_->close();
  verified_.close();
  ctx_order_.close();
  done_.close();
  committed_.close();
  results_.close();
}

void Pipeline::fail(std::exception_ptr e) {
  {
    std::lock_guard lock(error_mu_);
    if (!error_) error_ = e;
  }
  close_all();
}

PipelineCounters Pipeline::counters() const {
  PipelineCounters c;
  c.blocks = blocks_;
  c.txs = txs_;
  c.block_verifications = block_verifs_;
  c.tx_verifications = tx_verifs_;
  c.endorsement_verifications = end_verifs_;
  c.unknown_principals = unknown_;
  c.stalled_publishes = results_.stalled_publishes();
  return c;
}

void Pipeline::block_verify_loop() {
  if (config_.synthetic_delay) tighten_timer_slack();
  try {
    while (in_flight_->acquire()) {
      auto e = fifos_.block.pop();
      if (!e) break;
      auto ctx = std::make_shared<BlockCtx>();
      ctx->entry = std::move(*e);
      const auto n = ctx->entry.num_txs;
      ctx->flags.assign(n, TxFlag::valid);
      ctx->tx_verify_us.assign(n, 0.f);
      ctx->vscc_us.assign(n, 0.f);
      ctx->tx_verifs.assign(n, 0);
      ctx->end_verifs.assign(n, 0);
      ctx->started = Clock::now();
      ctx->valid = engine_->verify_one(ctx->entry.orderer);
      ++block_verifs_;
      ctx->block_verify_us = micros(Clock::now() - ctx->started);
      if (!verified_.push(std::move(ctx))) break;
    }
  } catch (...) {
    fail(std::current_exception());
  }
  verified_.close();
}

bool Pipeline::next_job(TxJob& job) {
  std::lock_guard lock(dispatch_mu_);
  while (!current_ || next_tx_ == current_->entry.num_txs) {
    auto b = verified_.pop();
    if (!b) return false;
    current_ = std::move(*b);
    next_tx_ = 0;
    current_->tx_fifo_depth = fifos_.tx.size();
    current_->ends_fifo_depth = fifos_.ends.size();
    if (!ctx_order_.push(current_)) return false;
  }
  auto tx = fifos_.tx.pop();
  if (!tx) return false;
  if (tx->block_num != current_->entry.block_num || tx->tx_num != next_tx_) {
    throw ProtocolError("tx FIFO out of step: expected block " + std::to_string(current_->entry.block_num) +
                        " tx " + std::to_string(next_tx_) + ", got block " + std::to_string(tx->block_num) +
                        " tx " + std::to_string(tx->tx_num));
  }
  job.ctx = current_;
  job.ends.clear();
  for (std::uint32_t i = 0; i < tx->num_ends; ++i) {
    auto e = fifos_.ends.pop();
    if (!e) return false;
    if (e->block_num != tx->block_num || e->tx_num != tx->tx_num) {
      throw ProtocolError("endorsement FIFO out of step at block " + std::to_string(tx->block_num));
    }
    job.ends.push_back(std::move(*e));
  }
  job.tx = std::move(*tx);
  ++next_tx_;
  return true;
}

void Pipeline::lane_loop() {
  if (config_.synthetic_delay) tighten_timer_slack();
  RegisterFile regs(policies_.num_orgs());
  std::vector<const VerifyRequest*> wave;
  const std::size_t width = config_.engines_per_vscc;
  std::unique_ptr<bool[]> out(new bool[width]);
  std::uint64_t unknown_seen = 0;
  wave.reserve(width);
  try {
    TxJob job;
    while (next_job(job)) {
      auto& ctx = *job.ctx;
      const auto t = job.tx.tx_num;
      TxFlag flag = TxFlag::valid;
      auto t0 = Clock::now();
      if (!ctx.valid) {
        flag = TxFlag::skipped_block_invalid;
      } else {
        ++tx_verifs_;
        ctx.tx_verifs[t] = 1;
        if (!engine_->verify_one(job.tx.client)) flag = TxFlag::invalid_sig;
      }
      auto t1 = Clock::now();
      ctx.tx_verify_us[t] = static_cast<float>(micros(t1 - t0));

      if (flag == TxFlag::valid) {
        const auto* policy = policies_.find(job.tx.cc_id);
        bool satisfied = false;
        unsigned issued = 0;
        if (policy) {
          regs.clear();
          const std::size_t n = job.ends.size();
          for (std::size_t i = 0; i < n && !satisfied; i += wave.size()) {
            wave.clear();
            for (std::size_t j = i; j < n && wave.size() < width; ++j) wave.push_back(&job.ends[j].request);
            std::span<bool> outs(out.get(), wave.size());
            engine_->verify_wave(wave, outs);
            issued += static_cast<unsigned>(wave.size());
            for (std::size_t j = 0; j < wave.size() && !satisfied; ++j) {
              regs.record(job.ends[i + j].endorser_id, outs[j]);
              satisfied = policy->compiled.evaluate(regs);
            }
          }
          unknown_ += regs.unknown_principals() - std::exchange(unknown_seen, regs.unknown_principals());
        }
        end_verifs_ += issued;
        ctx.end_verifs[t] = static_cast<std::uint8_t>(std::min(issued, 255u));
        if (!satisfied) flag = TxFlag::invalid_policy;
        ctx.vscc_us[t] = static_cast<float>(micros(Clock::now() - t1));
      }
      ctx.flags[t] = flag;
      if (!done_.push(LaneDone{std::move(job.ctx), t, job.tx.rdset_size, job.tx.wrset_size})) break;
    }
  } catch (...) {
    fail(std::current_exception());
  }
  if (--lanes_running_ == 0) done_.close();
}

void Pipeline::collector_loop() {
  try {
    std::map<std::pair<std::uint64_t, std::uint32_t>, LaneDone> pending;
    std::shared_ptr<BlockCtx> cur;
    std::uint32_t expected = 0;
    std::deque<LaneDone> batch;
    while (done_.pop_all(batch)) {
      for (auto& d : batch) {
        auto key = std::make_pair(d.ctx->entry.block_num, d.tx_num);
        pending.emplace(key, std::move(d));
      }
      batch.clear();
      while (!pending.empty()) {
        if (!cur) {
          auto c = ctx_order_.pop();
          if (!c) return;
          cur = std::move(*c);
          expected = 0;
        }
        cur->collector_max_pending = std::max<std::uint64_t>(cur->collector_max_pending, pending.size());
        auto it = pending.begin();
        if (it->first != std::make_pair(cur->entry.block_num, expected)) break;
        if (!committed_.push(std::move(it->second))) return;
        pending.erase(it);
        if (++expected == cur->entry.num_txs) cur.reset();
      }
    }
  } catch (...) {
    fail(std::current_exception());
  }
  committed_.close();
}

void Pipeline::mvcc_loop() {
  try {
    std::deque<LaneDone> batch;
    std::vector<std::pair<std::string, Bytes>> writes;
    while (committed_.pop_all(batch)) {
      for (auto& d : batch) {
        auto& ctx = *d.ctx;
        const auto t = d.tx_num;
        const auto b = ctx.entry.block_num;
        auto t0 = Clock::now();
        TxFlag& flag = ctx.flags[t];
        if (flag == TxFlag::valid && ctx.status != BlockStatus::ok) flag = TxFlag::invalid_mvcc;
        bool check = flag == TxFlag::valid;
        for (std::uint32_t i = 0; i < d.rdset_size; ++i) {
          auto r = fifos_.rdset.pop();
          if (!r) throw ProtocolError("read-set FIFO closed mid-block");
          if (r->block_num != b || r->tx_num != t) throw ProtocolError("read-set FIFO out of step");
          if (!check) continue;
          auto got = store_.get(r->key);
          bool match = got ? got->version == r->version : r->version == Version{};
          if (!match) {
            flag = TxFlag::invalid_mvcc;
            check = false;
          }
        }
        writes.clear();
        for (std::uint32_t i = 0; i < d.wrset_size; ++i) {
          auto w = fifos_.wrset.pop();
          if (!w) throw ProtocolError("write-set FIFO closed mid-block");
          if (w->block_num != b || w->tx_num != t) throw ProtocolError("write-set FIFO out of step");
          if (flag == TxFlag::valid) writes.emplace_back(std::move(w->key), std::move(w->value));
        }
        if (flag == TxFlag::valid && !writes.empty()) {
          try {
            store_.put_all(writes, Version{b, t});
          } catch (const CapacityError&) {
            ctx.status = BlockStatus::capacity_exceeded;
            flag = TxFlag::invalid_mvcc;
          }
        }
        ctx.mvcc_us += micros(Clock::now() - t0);
        if (t + 1 != ctx.entry.num_txs) continue;

        auto now = Clock::now();
        ValidationResult res;
        res.block_num = b;
        res.block_valid = ctx.valid;
        res.num_txs = ctx.entry.num_txs;
        res.status = ctx.status;
        res.flags = ctx.flags;
        auto& s = res.stats;
        s.block_verify_us = ctx.block_verify_us;
        for (auto v : ctx.tx_verify_us) s.tx_verify_us += v;
        for (auto v : ctx.vscc_us) s.vscc_us += v;
        s.mvcc_us = ctx.mvcc_us;
        s.block_verifications = 1;
        for (auto v : ctx.tx_verifs) s.tx_verifications += v;
        for (auto v : ctx.end_verifs) s.endorsement_verifications += v;
        s.tx_fifo_depth = ctx.tx_fifo_depth;
        s.ends_fifo_depth = ctx.ends_fifo_depth;
        s.collector_max_pending = ctx.collector_max_pending;
        s.latency_us = micros(now - ctx.entry.emitted_at);
        s.started_ns = stamp(ctx.started);
        s.finished_ns = stamp(now);
        s.tx_vscc_us = ctx.vscc_us;
        s.tx_endorsement_verifications = ctx.end_verifs;
        ++blocks_;
        txs_ += ctx.entry.num_txs;
        if (!results_.publish(std::move(res))) return;
        in_flight_->release();
      }
      batch.clear();
    }
  } catch (...) {
    fail(std::current_exception());
  }
}

}  // namespace bmac
