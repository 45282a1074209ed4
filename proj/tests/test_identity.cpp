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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "bmac/error.hpp"
#include "bmac/identity.hpp"

using namespace bmac;

namespace {

PublicKey key_for(const std::string& s) { return PrivateKey::derive(as_bytes(s)).public_key(); }

}  // namespace

TEST(EncodeId, LayoutExamples) {
  EXPECT_EQ(encode_id(1, Role::peer, 0).value(), 0x0120);
  EXPECT_EQ(encode_id(0, Role::orderer, 0).value(), 0x0000);
  EXPECT_EQ(encode_id(255, Role::client, 15).value(), 0xFF3F);
}

TEST(EncodeId, DecodeEncodeIsIdentity) {
  for (int org = 0; org < 256; ++org) {
    for (int role = 0; role < kRoleCount; ++role) {
      for (int seq = 0; seq < 16; ++seq) {
        auto id = encode_id(org, static_cast<Role>(role), seq);
        ASSERT_EQ(id.org(), org);
        ASSERT_EQ(id.role_bits(), role);
        ASSERT_EQ(id.seq(), seq);
      }
    }
  }
}

TEST(EncodeId, OutOfRange) {
  EXPECT_THROW(encode_id(256, Role::peer, 0), RangeError);
  EXPECT_THROW(encode_id(-1, Role::peer, 0), RangeError);
  EXPECT_THROW(encode_id(0, Role::peer, 16), RangeError);
  EXPECT_THROW(encode_id(0, static_cast<Role>(4), 0), RangeError);
}

TEST(Roles, ParseAndName) {
  EXPECT_EQ(parse_role("Peer"), Role::peer);
  EXPECT_EQ(parse_role("ADMIN"), Role::admin);
  EXPECT_EQ(parse_role("member"), Role::client);
  EXPECT_EQ(role_name(Role::orderer), "orderer");
  EXPECT_THROW(parse_role("auditor"), ConfigError);
}

TEST(Certificate, DefaultSizeAndRoundTrip) {
  auto c = Certificate::make("Org1", Role::peer, 3, key_for("a"));
  auto bytes = c.serialize();
  EXPECT_EQ(bytes.size(), kDefaultCertSize);
  EXPECT_EQ(Certificate::parse(bytes), c);
  EXPECT_EQ(Certificate::make("Org1", Role::peer, 3, key_for("a")).serialize(), bytes);  // deterministic
}

TEST(Certificate, ConfigurableSize) {
  EXPECT_EQ(Certificate::make("Org1", Role::peer, 0, key_for("a"), 1200).serialize().size(), 1200u);
  EXPECT_THROW(Certificate::make("Org1", Role::peer, 0, key_for("a"), 40), ConfigError);
}

TEST(Certificate, ParseRejectsGarbage) {
  auto bytes = Certificate::make("Org1", Role::peer, 0, key_for("a")).serialize();
  EXPECT_THROW(Certificate::parse(ByteView(bytes).first(10)), DecodeError);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_THROW(Certificate::parse(extra), DecodeError);
}

TEST(IdentityCache, RegisterIsIdempotent) {
  IdentityCache cache({"OrdererOrg", "Org1"});
  auto cert = Certificate::make("Org1", Role::peer, 0, key_for("p"));
  auto a = cache.register_cert(cert);
  auto b = cache.register_cert(cert);
  EXPECT_TRUE(a.inserted);
  EXPECT_FALSE(b.inserted);
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.id.value(), 0x0120);
  EXPECT_EQ(cache.size(), 1u);
}

TEST(IdentityCache, SeqDiffersInLowBits) {
  IdentityCache cache({"OrdererOrg", "Org1"});
  auto a = cache.register_cert(Certificate::make("Org1", Role::peer, 0, key_for("p0"))).id;
  auto b = cache.register_cert(Certificate::make("Org1", Role::peer, 5, key_for("p5"))).id;
  EXPECT_EQ(a.value() ^ b.value(), 5);
}

TEST(IdentityCache, CollisionAndUnknownOrg) {
  IdentityCache cache({"OrdererOrg", "Org1"});
  cache.register_cert(Certificate::make("Org1", Role::peer, 0, key_for("p")));
  EXPECT_THROW(cache.register_cert(Certificate::make("Org1", Role::peer, 0, key_for("q"))), ConfigError);
  EXPECT_THROW(cache.register_cert(Certificate::make("Org9", Role::peer, 0, key_for("q"))), ConfigError);
  EXPECT_THROW(cache.install(EncodedId(0x0120), Certificate::make("Org1", Role::peer, 0, key_for("z")).serialize()),
               ConfigError);
}

TEST(IdentityCache, Bijection) {
  IdentityCache cache({"OrdererOrg", "Org1", "Org2"});
  for (int org = 1; org <= 2; ++org) {
    for (int seq = 0; seq < 4; ++seq) {
      cache.register_cert(Certificate::make("Org" + std::to_string(org), Role::peer, seq,
                                            key_for(std::to_string(org * 10 + seq))));
    }
  }
  for (const auto& [id, entry] : cache.entries()) {
    EXPECT_EQ(cache.find(*entry.cert), id);
    EXPECT_EQ(*cache.lookup(id)->cert, *entry.cert);
    EXPECT_EQ(Certificate::parse(*entry.cert).public_key, Bytes(entry.key->bytes().begin(), entry.key->bytes().end()));
  }
  EXPECT_FALSE(cache.lookup(EncodedId(0x0330)).has_value());
}

TEST(IdentityCache, ConcurrentReadersSeeRegistrations) {
  IdentityCache cache({"OrdererOrg", "Org1"});
  std::vector<Bytes> certs;
  for (int seq = 0; seq < 16; ++seq) {
    certs.push_back(Certificate::make("Org1", Role::client, seq, key_for("c" + std::to_string(seq))).serialize());
  }
  std::atomic<bool> stop{false};
  std::atomic<long> inconsistent{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 4; ++r) {
    readers.emplace_back([&] {
      for (int round = 0; round < 200 && !stop; ++round) {
        for (const auto& c : certs) {
          if (auto id = cache.find(c)) {
            auto e = cache.lookup(*id);
            if (!e || *e->cert != c) ++inconsistent;
          }
        }
        std::this_thread::yield();
      }
    });
  }
  for (const auto& c : certs) {
    cache.register_cert(c);
    std::this_thread::yield();
  }
  stop = true;
  for (auto& t : readers) t.join();
  EXPECT_EQ(inconsistent, 0);
  for (const auto& c : certs) EXPECT_TRUE(cache.find(c).has_value());
}
