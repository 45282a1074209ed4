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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "bmac/block.hpp"

namespace bmac {

inline constexpr std::size_t kDefaultStoreCapacity = 8192;

struct VersionedValue {
  Bytes value;
  Version version;

  bool operator==(const VersionedValue&) const = default;
};

/// In-memory versioned key-value store. Any number of readers; writes take
/// the store exclusively, so a key being written cannot be read until the
/// write has completed. Versions are opaque to the store.
class KvStore {
 public:
  using Snapshot = std::map<std::string, VersionedValue>;

  explicit KvStore(std::size_t capacity = kDefaultStoreCapacity) : capacity_(capacity) {}

  std::optional<VersionedValue> get(const std::string& key) const;
  /// Throws CapacityError when inserting a new key into a full store.
  void put(const std::string& key, Bytes value, Version version);
  /// All-or-nothing: either every write is installed or, if the new keys
  /// would not fit, none is and CapacityError is thrown.
  void put_all(const std::vector<std::pair<std::string, Bytes>>& writes, Version version);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  Snapshot snapshot() const;
  /// Replaces the contents (for seeding and tests).
  void load(const Snapshot& s);
  /// Lines of `key value_hex block_num tx_num`, sorted by key; an empty
  /// value is written as `-`.
  void dump(const std::string& path) const;

  /// Test hook run with the write lock held, once per written key.
  void set_write_hook(std::function<void(const std::string&)> hook) { hook_ = std::move(hook); }

 private:
  std::size_t capacity_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, VersionedValue> data_;
  std::function<void(const std::string&)> hook_;
};

/// Parses a file written by KvStore::dump. Throws DecodeError on a bad line.
KvStore::Snapshot read_dump(const std::string& path);

}  // namespace bmac
