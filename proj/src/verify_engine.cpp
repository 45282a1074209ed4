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

#include "bmac/verify_engine.hpp"

#include <thread>

#ifdef __linux__
#include <sys/prctl.h>
#endif

namespace bmac {

std::string VerdictTable::make_key(ByteView key, const Hash32& digest, const RawSignature& sig) {
  std::string k;
  k.reserve(key.size() + 96);
  k.append(reinterpret_cast<const char*>(key.data()), key.size());
  k.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  k.append(reinterpret_cast<const char*>(sig.r.data()), sig.r.size());
  k.append(reinterpret_cast<const char*>(sig.s.data()), sig.s.size());
  return k;
}

void VerdictTable::record(const PublicKey& key, const Hash32& digest, const RawSignature& sig, bool ok) {
  std::lock_guard lock(mu_);
  verdicts_[make_key(key.bytes(), digest, sig)] = ok;
}

std::optional<bool> VerdictTable::lookup(const VerifyRequest& r) const {
  if (r.pre_failed || !r.key) return false;
  auto k = make_key(r.key->bytes(), r.digest, r.sig);
  std::lock_guard lock(mu_);
  auto it = verdicts_.find(k);
  if (it == verdicts_.end()) return std::nullopt;
  return it->second;
}

std::size_t VerdictTable::size() const {
  std::lock_guard lock(mu_);
  return verdicts_.size();
}

VerdictFn crypto_verdicts() {
  return [](const VerifyRequest& r) { return !r.pre_failed && r.key && r.key->verify(r.digest, r.sig); };
}

VerdictFn table_verdicts(std::shared_ptr<const VerdictTable> table) {
  return [table = std::move(table)](const VerifyRequest& r) {
    if (auto v = table->lookup(r)) return *v;
    return !r.pre_failed && r.key && r.key->verify(r.digest, r.sig);
  };
}

bool VerifyEngine::verify_one(const VerifyRequest& r) {
  const VerifyRequest* wave[1] = {&r};
  bool out[1] = {false};
  verify_wave(wave, out);
  return out[0];
}

void CryptoEngine::verify_wave(std::span<const VerifyRequest* const> wave, std::span<bool> out) {
  for (std::size_t i = 0; i < wave.size(); ++i) {
    const auto& r = *wave[i];
    out[i] = !r.pre_failed && r.key && r.key->verify(r.digest, r.sig);
  }
}

SyntheticEngine::SyntheticEngine(std::chrono::microseconds delay, VerdictFn verdicts)
    : delay_(delay), verdicts_(std::move(verdicts)) {}

void SyntheticEngine::verify_wave(std::span<const VerifyRequest* const> wave, std::span<bool> out) {
  auto until = Clock::now() + delay_;
  for (std::size_t i = 0; i < wave.size(); ++i) out[i] = !wave[i]->pre_failed && verdicts_(*wave[i]);
  std::this_thread::sleep_until(until);
}

std::string SyntheticEngine::describe() const {
  return "synthetic(" + std::to_string(delay_.count()) + "us)";
}

void tighten_timer_slack() {
#ifdef __linux__
  prctl(PR_SET_TIMERSLACK, 1UL, 0UL, 0UL, 0UL);
#endif
}

}  // namespace bmac
