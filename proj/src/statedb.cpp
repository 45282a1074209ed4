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

#include "bmac/statedb.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_set>

#include "bmac/error.hpp"

namespace bmac {

std::optional<VersionedValue> KvStore::get(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

void KvStore::put(const std::string& key, Bytes value, Version version) {
  std::unique_lock lock(mu_);
  auto it = data_.find(key);
  if (it == data_.end()) {
    if (data_.size() >= capacity_) {
      throw CapacityError("state store full (" + std::to_string(capacity_) + " entries) writing key " + key);
    }
    it = data_.emplace(key, VersionedValue{}).first;
  }
  if (hook_) hook_(key);
  it->second = VersionedValue{std::move(value), version};
}

void KvStore::put_all(const std::vector<std::pair<std::string, Bytes>>& writes, Version version) {
  std::unique_lock lock(mu_);
  std::unordered_set<std::string_view> fresh;
  for (const auto& [k, v] : writes) {
    if (!data_.contains(k)) fresh.insert(k);
  }
  if (data_.size() + fresh.size() > capacity_) {
    throw CapacityError("state store full (" + std::to_string(capacity_) + " entries): " +
                        std::to_string(fresh.size()) + " new keys do not fit");
  }
  for (const auto& [k, v] : writes) {
    auto& slot = data_[k];
    if (hook_) hook_(k);
    slot = VersionedValue{v, version};
  }
}

std::size_t KvStore::size() const {
  std::shared_lock lock(mu_);
  return data_.size();
}

KvStore::Snapshot KvStore::snapshot() const {
  std::shared_lock lock(mu_);
  return Snapshot(data_.begin(), data_.end());
}

void KvStore::load(const Snapshot& s) {
  std::unique_lock lock(mu_);
  if (s.size() > capacity_) throw CapacityError("snapshot larger than store capacity");
  data_ = std::unordered_map<std::string, VersionedValue>(s.begin(), s.end());
}

void KvStore::dump(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  for (const auto& [k, v] : snapshot()) {
    out << k << ' ' << (v.value.empty() ? "-" : to_hex(v.value)) << ' ' << v.version.block_num << ' ' << v.version.tx_num << '\n';
  }
}

KvStore::Snapshot read_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  KvStore::Snapshot out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key, hex;
    VersionedValue v;
    if (!(ls >> key >> hex >> v.version.block_num >> v.version.tx_num)) {
      throw DecodeError("bad state dump line " + std::to_string(n), 0);
    }
    if (hex != "-") v.value = from_hex(hex);
    out.emplace(std::move(key), std::move(v));
  }
  return out;
}

}  // namespace bmac
