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

#include "bmac/identity.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

#include "bmac/error.hpp"
#include "bmac/sha256.hpp"

namespace bmac {

namespace {
constexpr std::size_t kFixedCertBytes = 2 + 1 + 1 + 2 + 2;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string key_of(ByteView b) { return std::string(as_chars(b)); }
}  // namespace

std::string_view role_name(Role r) {
  switch (r) {
    case Role::orderer: return "orderer";
    case Role::admin: return "admin";
    case Role::peer: return "peer";
    case Role::client: return "client";
  }
  return "unknown";
}

Role parse_role(std::string_view name) {
  auto n = lower(name);
  if (n == "orderer") return Role::orderer;
  if (n == "admin") return Role::admin;
  if (n == "peer") return Role::peer;
  if (n == "client" || n == "member") return Role::client;
  throw ConfigError("unknown role '" + std::string(name) + "'");
}

EncodedId encode_id(int org_index, Role role, int seq) {
  auto r = static_cast<int>(role);
  if (org_index < 0 || org_index > 0xFF) throw RangeError("org index out of range");
  if (r < 0 || r >= kRoleCount) throw RangeError("role out of range");
  if (seq < 0 || seq > 0xF) throw RangeError("node sequence out of range");
  return EncodedId(static_cast<std::uint16_t>((org_index << 8) | (r << 4) | seq));
}

Certificate Certificate::make(std::string org_name, Role role, int seq, const PublicKey& key,
                              std::size_t serialized_size) {
  if (seq < 0 || seq > 0xF) throw RangeError("node sequence out of range");
  std::size_t fixed = kFixedCertBytes + org_name.size() + key.bytes().size();
  if (serialized_size < fixed || serialized_size - fixed > 0xFFFF || org_name.size() > 0xFFFF) {
    throw ConfigError("certificate size " + std::to_string(serialized_size) +
                      " cannot hold identity " + org_name);
  }
  Certificate c;
  c.org_name = std::move(org_name);
  c.role = role;
  c.seq = static_cast<std::uint8_t>(seq);
  c.public_key.assign(key.bytes().begin(), key.bytes().end());
  std::size_t pad = serialized_size - fixed;
  c.padding.reserve(pad);
  Hash32 block = Sha256().update(as_bytes(c.org_name)).update(c.public_key).finish();
  while (c.padding.size() < pad) {
    block = Sha256::digest(block);
    std::size_t take = std::min(block.size(), pad - c.padding.size());
    c.padding.insert(c.padding.end(), block.begin(), block.begin() + static_cast<long>(take));
  }
  return c;
}

Bytes Certificate::serialize() const {
  Bytes out;
  out.reserve(kFixedCertBytes + org_name.size() + public_key.size() + padding.size());
  put_u16(out, static_cast<std::uint16_t>(org_name.size()));
  append(out, as_bytes(org_name));
  put_u8(out, static_cast<std::uint8_t>(role));
  put_u8(out, seq);
  put_u16(out, static_cast<std::uint16_t>(public_key.size()));
  append(out, public_key);
  put_u16(out, static_cast<std::uint16_t>(padding.size()));
  append(out, padding);
  return out;
}

Certificate Certificate::parse(ByteView b) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n, const char* what) {
    if (b.size() - pos < n) throw DecodeError(std::string("truncated certificate ") + what, pos);
  };
  Certificate c;
  need(2, "name length");
  std::size_t name_len = get_u16(&b[pos]);
  pos += 2;
  need(name_len, "name");
  c.org_name.assign(reinterpret_cast<const char*>(&b[pos]), name_len);
  pos += name_len;
  need(2, "role/seq");
  if (b[pos] >= kRoleCount) throw DecodeError("invalid certificate role", pos);
  c.role = static_cast<Role>(b[pos++]);
  if (b[pos] > 0xF) throw DecodeError("invalid certificate sequence", pos);
  c.seq = b[pos++];
  need(2, "key length");
  std::size_t key_len = get_u16(&b[pos]);
  pos += 2;
  need(key_len, "key");
  c.public_key.assign(b.begin() + static_cast<long>(pos), b.begin() + static_cast<long>(pos + key_len));
  pos += key_len;
  need(2, "padding length");
  std::size_t pad_len = get_u16(&b[pos]);
  pos += 2;
  need(pad_len, "padding");
  c.padding.assign(b.begin() + static_cast<long>(pos), b.begin() + static_cast<long>(pos + pad_len));
  pos += pad_len;
  if (pos != b.size()) throw DecodeError("trailing bytes after certificate", pos);
  return c;
}

IdentityCache::IdentityCache(std::vector<std::string> org_names) : orgs_(std::move(org_names)) {
  if (orgs_.size() > 256) throw ConfigError("at most 256 organizations fit the id layout");
}

int IdentityCache::org_index(std::string_view org_name) const {
  auto it = std::find(orgs_.begin(), orgs_.end(), org_name);
  return it == orgs_.end() ? -1 : static_cast<int>(it - orgs_.begin());
}

IdentityCache::Registration IdentityCache::register_cert(ByteView cert_bytes) {
  {
    std::shared_lock lock(mu_);
    if (auto it = by_cert_.find(key_of(cert_bytes)); it != by_cert_.end()) return {it->second, false};
  }
  Certificate cert = Certificate::parse(cert_bytes);
  int org = org_index(cert.org_name);
  if (org < 0) throw ConfigError("certificate from unknown organization " + cert.org_name);
  EncodedId id = encode_id(org, cert.role, cert.seq);
  std::unique_lock lock(mu_);
  return insert_locked(id, cert_bytes);
}

void IdentityCache::install(EncodedId id, ByteView cert_bytes) {
  std::unique_lock lock(mu_);
  insert_locked(id, cert_bytes);
}

IdentityCache::Registration IdentityCache::insert_locked(EncodedId id, ByteView cert_bytes) {
  auto key = key_of(cert_bytes);
  if (auto it = by_cert_.find(key); it != by_cert_.end()) {
    if (it->second != id) {
      throw ConfigError("certificate already registered under id " +
                        std::to_string(it->second.value()));
    }
    return {id, false};
  }
  if (by_id_.contains(id.value())) {
    throw ConfigError("id collision: " + std::to_string(id.value()) +
                      " is bound to a different certificate");
  }
  Certificate cert = Certificate::parse(cert_bytes);
  Entry entry{std::make_shared<const Bytes>(cert_bytes.begin(), cert_bytes.end()),
              std::make_shared<const PublicKey>(PublicKey::from_bytes(cert.public_key))};
  by_id_.emplace(id.value(), std::move(entry));
  by_cert_.emplace(std::move(key), id);
  return {id, true};
}

std::optional<EncodedId> IdentityCache::find(ByteView cert_bytes) const {
  std::shared_lock lock(mu_);
  if (auto it = by_cert_.find(key_of(cert_bytes)); it != by_cert_.end()) return it->second;
  return std::nullopt;
}

std::optional<IdentityCache::Entry> IdentityCache::lookup(EncodedId id) const {
  std::shared_lock lock(mu_);
  if (auto it = by_id_.find(id.value()); it != by_id_.end()) return it->second;
  return std::nullopt;
}

std::size_t IdentityCache::size() const {
  std::shared_lock lock(mu_);
  return by_id_.size();
}

std::vector<std::pair<EncodedId, IdentityCache::Entry>> IdentityCache::entries() const {
  std::shared_lock lock(mu_);
  std::vector<std::pair<EncodedId, Entry>> out;
  out.reserve(by_id_.size());
  for (const auto& [id, e] : by_id_) out.emplace_back(EncodedId(id), e);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace bmac
