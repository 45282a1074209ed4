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
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bmac/bytes.hpp"
#include "bmac/ecdsa.hpp"

namespace bmac {

enum class Role : std::uint8_t { orderer = 0, admin = 1, peer = 2, client = 3 };

inline constexpr int kRoleCount = 4;

std::string_view role_name(Role r);
/// Case-insensitive; throws ConfigError on unknown names.
Role parse_role(std::string_view name);

/// 16-bit identity id: org index in bits 15..8, role in 7..4, seq in 3..0.
class EncodedId {
 public:
  constexpr EncodedId() = default;
  constexpr explicit EncodedId(std::uint16_t v) : value_(v) {}

  constexpr std::uint16_t value() const { return value_; }
  constexpr int org() const { return value_ >> 8; }
  constexpr int role_bits() const { return (value_ >> 4) & 0xF; }
  constexpr int seq() const { return value_ & 0xF; }

  constexpr auto operator<=>(const EncodedId&) const = default;

 private:
  std::uint16_t value_ = 0;
};

/// Throws RangeError if any field exceeds its bit width.
EncodedId encode_id(int org_index, Role role, int seq);

inline constexpr std::size_t kDefaultCertSize = 860;

/// Self-describing stand-in for an X.509 certificate. Only the size and
/// the embedded public key matter to the protocol; padding fills the record
/// up to the configured serialized size.
struct Certificate {
  std::string org_name;
  Role role = Role::peer;
  std::uint8_t seq = 0;
  Bytes public_key;  // uncompressed SEC1, 65 bytes
  Bytes padding;

  /// Builds a certificate whose serialization is exactly `serialized_size`
  /// bytes, with deterministic padding. Throws ConfigError when the size
  /// cannot hold the fixed fields.
  static Certificate make(std::string org_name, Role role, int seq, const PublicKey& key,
                          std::size_t serialized_size = kDefaultCertSize);

  Bytes serialize() const;
  static Certificate parse(ByteView bytes);

  bool operator==(const Certificate&) const = default;
};

/// Bidirectional certificate <-> id map. Reads may run concurrently; the
/// rare registrations take an exclusive lock. Entries are never evicted.
class IdentityCache {
 public:
  struct Entry {
    std::shared_ptr<const Bytes> cert;
    std::shared_ptr<const PublicKey> key;
  };

  struct Registration {
    EncodedId id;
    bool inserted = false;
  };

  explicit IdentityCache(std::vector<std::string> org_names);

  /// Returns the existing id for these certificate bytes, or inserts them
  /// under the id derived from (org, role, seq). Throws ConfigError when
  /// that id is already bound to different bytes or the org is unknown.
  Registration register_cert(ByteView cert_bytes);
  Registration register_cert(const Certificate& cert) { return register_cert(cert.serialize()); }

  /// Receiver-side insert with an id chosen by the sender.
  void install(EncodedId id, ByteView cert_bytes);

  std::optional<EncodedId> find(ByteView cert_bytes) const;
  std::optional<Entry> lookup(EncodedId id) const;
  std::size_t size() const;

  int org_index(std::string_view org_name) const;  // -1 if unknown
  const std::vector<std::string>& orgs() const { return orgs_; }

  /// All entries, ordered by id.
  std::vector<std::pair<EncodedId, Entry>> entries() const;

 private:
  Registration insert_locked(EncodedId id, ByteView cert_bytes);

  std::vector<std::string> orgs_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, EncodedId> by_cert_;
  std::unordered_map<std::uint16_t, Entry> by_id_;
};

}  // namespace bmac
