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

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "bmac/fifo_entries.hpp"

namespace bmac {

/// Ground-truth verdicts keyed by (public key, digest, r, s), usually
/// recorded by the reference validator.
class VerdictTable {
 public:
  void record(const PublicKey& key, const Hash32& digest, const RawSignature& sig, bool ok);
  std::optional<bool> lookup(const VerifyRequest& r) const;
  std::size_t size() const;

 private:
  static std::string make_key(ByteView key, const Hash32& digest, const RawSignature& sig);

  mutable std::mutex mu_;
  std::unordered_map<std::string, bool> verdicts_;
};

using VerdictFn = std::function<bool(const VerifyRequest&)>;

/// Real P-256 verification.
VerdictFn crypto_verdicts();
/// Table lookup, falling back to real verification for unknown requests.
VerdictFn table_verdicts(std::shared_ptr<const VerdictTable> table);

/// A set of verification slots. A wave is issued to the slots at once and
/// returns when every request in it has completed. Thread-safe; every
/// lane drives its own waves.
class VerifyEngine {
 public:
  virtual ~VerifyEngine() = default;
  virtual void verify_wave(std::span<const VerifyRequest* const> wave, std::span<bool> out) = 0;
  bool verify_one(const VerifyRequest& r);
  virtual std::string describe() const = 0;
};

/// Verifies requests one after another in the calling thread.
class CryptoEngine final : public VerifyEngine {
 public:
  void verify_wave(std::span<const VerifyRequest* const> wave, std::span<bool> out) override;
  std::string describe() const override { return "crypto"; }
};

/// Fixed-latency engine: each wave takes `delay` of wall time (all slots
/// run in parallel), verdicts come from `verdicts`. If computing the
/// verdicts takes longer than the delay, no extra wait is added.
class SyntheticEngine final : public VerifyEngine {
 public:
  SyntheticEngine(std::chrono::microseconds delay, VerdictFn verdicts);
  void verify_wave(std::span<const VerifyRequest* const> wave, std::span<bool> out) override;
  std::string describe() const override;
  std::chrono::microseconds delay() const { return delay_; }

 private:
  std::chrono::microseconds delay_;
  VerdictFn verdicts_;
};

/// Lowers the calling thread's timer slack so short sleeps wake on time.
void tighten_timer_slack();

}  // namespace bmac
