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

#include "bmac/bytes.hpp"
#include "bmac/ecdsa.hpp"
#include "bmac/error.hpp"
#include "bmac/sha256.hpp"

using namespace bmac;

namespace {

Scalar scalar_hex(const char* hex) {
  auto b = from_hex(hex);
  Scalar s{};
  std::copy(b.begin(), b.end(), s.begin() + static_cast<long>(32 - b.size()));
  return s;
}

// RFC 6979 A.2.5 (P-256, SHA-256).
constexpr const char* kRfcKey = "C9AFA9D845BA75166B5C215767B1D6934E50C3DB36E89B127B8A622B120F6721";
constexpr const char* kRfcPub =
    "0460FED4BA255A9D31C961EB74C6356D68C049B8923B61FA6CE669622E60F29FB6"
    "7903FE1008B8BC99A41AE9E95628BC64F2F1B20C2D7E9F5177A3C294D4462299";

}  // namespace

TEST(Hex, RoundTrip) {
  Bytes b{0x00, 0x01, 0xAB, 0xFF};
  EXPECT_EQ(to_hex(b), "0001abff");
  EXPECT_EQ(from_hex("0001ABff"), b);
  EXPECT_THROW(from_hex("abc"), DecodeError);
  EXPECT_THROW(from_hex("zz"), DecodeError);
}

TEST(Sha256, Fips180Vectors) {
  EXPECT_EQ(to_hex(Sha256::digest(as_bytes(std::string("abc")))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(to_hex(Sha256::digest({})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Sha256, StreamingAndForkEqualOneShot) {
  std::string a = "abcdbcdecdefdefgefghfghighijhijk", b = "ijkljklmklmnlmnomnopnopq";
  Sha256 h;
  h.update(as_bytes(a));
  Sha256 fork(h);
  h.update(as_bytes(b));
  EXPECT_EQ(to_hex(h.finish()), "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  EXPECT_EQ(fork.finish(), Sha256::digest(as_bytes(a)));
}

TEST(Ecdsa, Rfc6979KnownAnswers) {
  auto key = PrivateKey::from_scalar(scalar_hex(kRfcKey));
  EXPECT_EQ(to_hex(key.public_key().bytes()), to_hex(from_hex(kRfcPub)));

  auto s1 = sign_raw(Sha256::digest(as_bytes(std::string("sample"))), key);
  EXPECT_EQ(to_hex(s1.r), "efd48b2aacb6a8fd1140dd9cd45e81d69d2c877b56aaf991c34d0ea84eaf3716");
  EXPECT_EQ(to_hex(s1.s), "f7cb1c942d657c41d436c7a1b6e29f65f3e900dbb9aff4064dc4ab2f843acda8");

  auto s2 = sign_raw(Sha256::digest(as_bytes(std::string("test"))), key);
  EXPECT_EQ(to_hex(s2.r), "f1abb023518351cd71d881567b1ea663ed3efcf6c5132b354f28d3b0b7d38367");
  EXPECT_EQ(to_hex(s2.s), "019f4113742a2b14bd25926b49c649155f267e60d3814b4c0cc84250e46f0083");
}

TEST(Ecdsa, PublishedVectorVerifiesWithLibraryVerifier) {
  // Independent of our signer: published (r, s) against the published key.
  auto pub = PublicKey::from_bytes(from_hex(kRfcPub));
  RawSignature sig{scalar_hex("EFD48B2AACB6A8FD1140DD9CD45E81D69D2C877B56AAF991C34D0EA84EAF3716"),
                   scalar_hex("F7CB1C942D657C41D436C7A1B6E29F65F3E900DBB9AFF4064DC4AB2F843ACDA8")};
  auto d = Sha256::digest(as_bytes(std::string("sample")));
  EXPECT_TRUE(pub.verify(d, sig));
  EXPECT_TRUE(verify(der_encode_signature(sig), pub, d));
  d[0] ^= 1;
  EXPECT_FALSE(pub.verify(d, sig));
}

TEST(Ecdsa, SignVerifyRoundTripAndTamper) {
  auto key = PrivateKey::derive(as_bytes(std::string("round-trip")));
  auto pub = key.public_key();
  auto d = Sha256::digest(as_bytes(std::string("abc")));
  auto sig = sign(d, key);
  EXPECT_TRUE(verify(sig, pub, d));
  auto flipped = d;
  flipped[5] ^= 0x10;
  EXPECT_FALSE(verify(sig, pub, flipped));
  auto other = PrivateKey::derive(as_bytes(std::string("other"))).public_key();
  EXPECT_FALSE(verify(sig, other, d));
  EXPECT_EQ(sign(d, key), sig);  // deterministic nonce
}

TEST(Ecdsa, OutOfRangeScalarsRejected) {
  EXPECT_THROW(PrivateKey::from_scalar(Scalar{}), RangeError);
  // n itself
  EXPECT_THROW(PrivateKey::from_scalar(scalar_hex("FFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551")),
               RangeError);
  auto pub = PrivateKey::derive(as_bytes(std::string("k"))).public_key();
  auto d = Sha256::digest({});
  EXPECT_FALSE(pub.verify(d, RawSignature{}));
}

TEST(Ecdsa, PublicKeyMustBeOnCurve) {
  auto bad = from_hex(kRfcPub);
  bad[64] ^= 1;
  EXPECT_THROW(PublicKey::from_bytes(bad), DecodeError);
  EXPECT_THROW(PublicKey::from_bytes(Bytes(65, 0)), DecodeError);
  EXPECT_THROW(PublicKey::from_bytes(Bytes(33, 2)), DecodeError);
}

TEST(Der, HandEncodedSmallIntegers) {
  auto sig = der_decode_signature(from_hex("3006020101020101"));
  Scalar one{};
  one[31] = 1;
  EXPECT_EQ(sig.r, one);
  EXPECT_EQ(sig.s, one);
  EXPECT_EQ(to_hex(der_encode_signature(sig)), "3006020101020101");
}

TEST(Der, SignByteStripped) {
  // r = 0x80 needs a 0x00 sign byte in DER.
  auto sig = der_decode_signature(from_hex("30070202008002017f"));
  Scalar r{};
  r[31] = 0x80;
  Scalar s{};
  s[31] = 0x7f;
  EXPECT_EQ(sig.r, r);
  EXPECT_EQ(sig.s, s);
  EXPECT_EQ(to_hex(der_encode_signature(sig)), "30070202008002017f");
}

TEST(Der, FullWidthValues) {
  RawSignature s;
  s.r.fill(0xFF);
  s.s.fill(0x01);
  auto der = der_encode_signature(s);
  EXPECT_EQ(der.size(), 2u + 2 + 33 + 2 + 32);
  EXPECT_EQ(der_decode_signature(der), s);
}

TEST(Der, RoundTripOfSignerOutput) {
  auto key = PrivateKey::derive(as_bytes(std::string("der")));
  for (int i = 0; i < 32; ++i) {
    auto d = Sha256::digest(as_bytes(std::to_string(i)));
    auto der = sign(d, key);
    EXPECT_EQ(der_encode_signature(der_decode_signature(der)), der);
  }
}

TEST(Der, RejectsMalformedInput) {
  for (const char* hex : {
           "",                    // empty
           "3106020101020101",    // wrong outer tag
           "3007020101020101",    // length past end
           "300602010102010100",  // trailing byte
           "30050201010201",      // truncated integer
           "3006020201020101",    // inner length overruns
           "3006030101020101",    // not an INTEGER
           "300702020001020101",  // non-minimal integer (redundant 0x00)
           "3006020181020101",    // negative r
           "30080200020101",      // zero-length integer
           "308106020101020101",  // non-minimal length form
       }) {
    EXPECT_THROW(der_decode_signature(from_hex(hex)), DecodeError) << hex;
  }
  // 33-byte magnitude without a sign byte is wider than 256 bits.
  Bytes wide = from_hex("3026022101");
  wide.insert(wide.end(), 32, 0x11);
  append(wide, from_hex("020101"));
  wide[1] = static_cast<std::uint8_t>(wide.size() - 2);
  EXPECT_THROW(der_decode_signature(wide), DecodeError);
}

TEST(Der, MalformedIsDecodeErrorNotFalse) {
  auto key = PrivateKey::derive(as_bytes(std::string("x")));
  EXPECT_THROW(verify(from_hex("3000"), key.public_key(), Sha256::digest({})), DecodeError);
}
