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

#include "bmac/ecdsa.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>
#include <openssl/param_build.h>

#include <algorithm>
#include <cstring>

#include "bmac/error.hpp"
#include "bmac/sha256.hpp"

namespace bmac {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;

const EC_GROUP* p256() {
  static const EC_GROUP* group = [] {
    EC_GROUP* g = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
    if (g == nullptr) throw Error("P-256 unavailable");
    return g;
  }();
  return group;
}

const BIGNUM* order() { return EC_GROUP_get0_order(p256()); }

BnPtr bn_from(ByteView be) {
  BnPtr out(BN_bin2bn(be.data(), static_cast<int>(be.size()), nullptr));
  if (!out) throw Error("BN_bin2bn failed");
  return out;
}

Scalar scalar_from(const BIGNUM* bn) {
  Scalar out{};
  if (BN_bn2binpad(bn, out.data(), static_cast<int>(out.size())) < 0) {
    throw RangeError("value exceeds 256 bits");
  }
  return out;
}

BnPtr bn_new() {
  BnPtr out(BN_new());
  if (!out) throw Error("BN_new failed");
  return out;
}

Hash32 hmac(ByteView key, std::initializer_list<ByteView> parts) {
  Bytes msg;
  for (auto p : parts) append(msg, p);
  Hash32 out{};
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(), out.data(),
       &len);
  return out;
}

// Strict DER reader over a signature buffer.
class DerReader {
 public:
  explicit DerReader(ByteView in) : in_(in) {}

  std::uint8_t byte(const char* what) {
    if (pos_ >= in_.size()) throw DecodeError(std::string("truncated DER: ") + what, pos_);
    return in_[pos_++];
  }

  std::size_t length() {
    std::size_t at = pos_;
    std::uint8_t first = byte("length");
    if (first < 0x80) return first;
    if (first == 0x81) {
      std::uint8_t len = byte("length");
      if (len < 0x80) throw DecodeError("non-minimal DER length", at);
      return len;
    }
    throw DecodeError("unsupported DER length form", at);
  }

  Scalar integer() {
    std::size_t at = pos_;
    if (byte("integer tag") != 0x02) throw DecodeError("expected DER INTEGER", at);
    std::size_t len = length();
    std::size_t start = pos_;
    if (len == 0) throw DecodeError("empty DER INTEGER", start);
    if (in_.size() - pos_ < len) throw DecodeError("truncated DER INTEGER", pos_);
    ByteView v = in_.subspan(pos_, len);
    pos_ += len;
    if (v[0] & 0x80) throw DecodeError("negative DER INTEGER", start);
    if (v.size() > 1 && v[0] == 0x00 && (v[1] & 0x80) == 0) {
      throw DecodeError("non-minimal DER INTEGER", start);
    }
    if (v[0] == 0x00 && v.size() > 1) v = v.subspan(1);
    if (v.size() > 32) throw DecodeError("DER INTEGER wider than 256 bits", start);
    Scalar out{};
    std::copy(v.begin(), v.end(), out.end() - static_cast<std::ptrdiff_t>(v.size()));
    return out;
  }

  std::size_t pos() const { return pos_; }
  std::size_t size() const { return in_.size(); }

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

void put_der_integer(Bytes& out, const Scalar& v) {
  auto first = std::find_if(v.begin(), v.end(), [](std::uint8_t b) { return b != 0; });
  if (first == v.end()) first = v.end() - 1;
  bool pad = (*first & 0x80) != 0;
  out.push_back(0x02);
  out.push_back(static_cast<std::uint8_t>((v.end() - first) + (pad ? 1 : 0)));
  if (pad) out.push_back(0x00);
  out.insert(out.end(), first, v.end());
}

}  // namespace

RawSignature der_decode_signature(ByteView der) {
  DerReader rd(der);
  if (rd.byte("sequence tag") != 0x30) throw DecodeError("expected DER SEQUENCE", 0);
  std::size_t len = rd.length();
  std::size_t body = rd.pos();
  if (der.size() - body < len) throw DecodeError("truncated DER SEQUENCE", der.size());
  if (der.size() - body > len) throw DecodeError("trailing bytes after DER SEQUENCE", body + len);
  RawSignature sig;
  sig.r = rd.integer();
  sig.s = rd.integer();
  if (rd.pos() != der.size()) throw DecodeError("extra data inside DER SEQUENCE", rd.pos());
  return sig;
}

Bytes der_encode_signature(const RawSignature& sig) {
  Bytes body;
  put_der_integer(body, sig.r);
  put_der_integer(body, sig.s);
  Bytes out;
  out.reserve(body.size() + 2);
  out.push_back(0x30);
  out.push_back(static_cast<std::uint8_t>(body.size()));
  append(out, body);
  return out;
}

PrivateKey PrivateKey::from_scalar(const Scalar& d) {
  auto bn = bn_from(d);
  if (BN_is_zero(bn.get()) || BN_cmp(bn.get(), order()) >= 0) {
    throw RangeError("private scalar out of range");
  }
  return PrivateKey(d);
}

PrivateKey PrivateKey::derive(ByteView seed) {
  // d = (H(seed || ctr) mod (n - 1)) + 1, counter only guards the
  // astronomically unlikely zero digest.
  auto n_minus_1 = bn_new();
  BN_copy(n_minus_1.get(), order());
  BN_sub_word(n_minus_1.get(), 1);
  BnCtxPtr ctx(BN_CTX_new());
  Hash32 h = Sha256().update(as_bytes("bmac-key-derivation")).update(seed).finish();
  auto bn = bn_from(h);
  BN_mod(bn.get(), bn.get(), n_minus_1.get(), ctx.get());
  BN_add_word(bn.get(), 1);
  return PrivateKey(scalar_from(bn.get()));
}

PublicKey PrivateKey::public_key() const {
  BnCtxPtr ctx(BN_CTX_new());
  auto d = bn_from(d_);
  PointPtr q(EC_POINT_new(p256()));
  if (!q || EC_POINT_mul(p256(), q.get(), d.get(), nullptr, nullptr, ctx.get()) != 1) {
    throw Error("EC_POINT_mul failed");
  }
  Bytes sec1(65);
  if (EC_POINT_point2oct(p256(), q.get(), POINT_CONVERSION_UNCOMPRESSED, sec1.data(), sec1.size(),
                         ctx.get()) != sec1.size()) {
    throw Error("EC_POINT_point2oct failed");
  }
  return PublicKey::from_bytes(sec1);
}

struct PublicKey::Handle {
  EVP_PKEY* pkey = nullptr;
  ~Handle() { EVP_PKEY_free(pkey); }
};

PublicKey PublicKey::from_bytes(ByteView sec1) {
  if (sec1.size() != 65 || sec1[0] != 0x04) throw DecodeError("expected uncompressed P-256 point", 0);
  OSSL_PARAM_BLD* bld = OSSL_PARAM_BLD_new();
  OSSL_PARAM_BLD_push_utf8_string(bld, OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0);
  OSSL_PARAM_BLD_push_octet_string(bld, OSSL_PKEY_PARAM_PUB_KEY, sec1.data(), sec1.size());
  OSSL_PARAM* params = OSSL_PARAM_BLD_to_param(bld);
  EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr);
  auto handle = std::make_shared<Handle>();
  bool ok = ctx != nullptr && params != nullptr && EVP_PKEY_fromdata_init(ctx) == 1 &&
            EVP_PKEY_fromdata(ctx, &handle->pkey, EVP_PKEY_PUBLIC_KEY, params) == 1;
  EVP_PKEY_CTX_free(ctx);
  OSSL_PARAM_free(params);
  OSSL_PARAM_BLD_free(bld);
  if (!ok) throw DecodeError("invalid P-256 public key", 0);

  // fromdata does not reject off-curve points in every provider build; check explicitly.
  BnCtxPtr bctx(BN_CTX_new());
  PointPtr pt(EC_POINT_new(p256()));
  if (EC_POINT_oct2point(p256(), pt.get(), sec1.data(), sec1.size(), bctx.get()) != 1 ||
      EC_POINT_is_on_curve(p256(), pt.get(), bctx.get()) != 1) {
    throw DecodeError("point not on P-256", 0);
  }

  PublicKey key;
  key.bytes_.assign(sec1.begin(), sec1.end());
  key.handle_ = std::move(handle);
  return key;
}

bool PublicKey::verify(const Hash32& digest, const RawSignature& sig) const {
  Bytes der = der_encode_signature(sig);
  EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new(handle_->pkey, nullptr);
  if (ctx == nullptr) throw Error("EVP_PKEY_CTX_new failed");
  bool ok = EVP_PKEY_verify_init(ctx) == 1 &&
            EVP_PKEY_verify(ctx, der.data(), der.size(), digest.data(), digest.size()) == 1;
  EVP_PKEY_CTX_free(ctx);
  return ok;
}

RawSignature sign_raw(const Hash32& digest, const PrivateKey& key) {
  BnCtxPtr ctx(BN_CTX_new());
  const BIGNUM* n = order();
  auto d = bn_from(key.scalar());

  // bits2octets(h1): qlen == hlen == 256 so only a conditional subtraction.
  auto z = bn_from(digest);
  auto z_mod = bn_new();
  BN_nnmod(z_mod.get(), z.get(), n, ctx.get());
  Scalar h_oct = scalar_from(z_mod.get());
  const Scalar& x_oct = key.scalar();

  std::array<std::uint8_t, 32> v;
  std::array<std::uint8_t, 32> k_mac;
  v.fill(0x01);
  k_mac.fill(0x00);
  const std::uint8_t zero = 0x00;
  const std::uint8_t one = 0x01;
  k_mac = hmac(k_mac, {v, ByteView(&zero, 1), x_oct, h_oct});
  v = hmac(k_mac, {v});
  k_mac = hmac(k_mac, {v, ByteView(&one, 1), x_oct, h_oct});
  v = hmac(k_mac, {v});

  auto k = bn_new();
  auto r = bn_new();
  auto s = bn_new();
  auto kinv = bn_new();
  auto tmp = bn_new();
  PointPtr kg(EC_POINT_new(p256()));
  for (;;) {
    v = hmac(k_mac, {v});
    BN_bin2bn(v.data(), static_cast<int>(v.size()), k.get());
    if (!BN_is_zero(k.get()) && BN_cmp(k.get(), n) < 0) {
      if (EC_POINT_mul(p256(), kg.get(), k.get(), nullptr, nullptr, ctx.get()) != 1 ||
          EC_POINT_get_affine_coordinates(p256(), kg.get(), tmp.get(), nullptr, ctx.get()) != 1) {
        throw Error("EC_POINT_mul failed");
      }
      BN_nnmod(r.get(), tmp.get(), n, ctx.get());
      if (!BN_is_zero(r.get())) {
        // s = k^-1 (z + r d) mod n
        BN_mod_inverse(kinv.get(), k.get(), n, ctx.get());
        BN_mod_mul(tmp.get(), r.get(), d.get(), n, ctx.get());
        BN_mod_add(tmp.get(), tmp.get(), z_mod.get(), n, ctx.get());
        BN_mod_mul(s.get(), kinv.get(), tmp.get(), n, ctx.get());
        if (!BN_is_zero(s.get())) break;
      }
    }
    k_mac = hmac(k_mac, {v, ByteView(&zero, 1)});
    v = hmac(k_mac, {v});
  }
  return RawSignature{scalar_from(r.get()), scalar_from(s.get())};
}

Bytes sign(const Hash32& digest, const PrivateKey& key) {
  return der_encode_signature(sign_raw(digest, key));
}

bool verify(ByteView der_sig, const PublicKey& key, const Hash32& digest) {
  return key.verify(digest, der_decode_signature(der_sig));
}

}  // namespace bmac
