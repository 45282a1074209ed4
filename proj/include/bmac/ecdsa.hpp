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

#include <array>
#include <memory>

#include "bmac/bytes.hpp"

namespace bmac {

/// 256-bit big-endian integer, as fed to a P-256 verification engine.
using Scalar = std::array<std::uint8_t, 32>;

/// ECDSA signature as the (r, s) pair, fixed width.
struct RawSignature {
  Scalar r{};
  Scalar s{};

  bool operator==(const RawSignature&) const = default;
};

/// Strict DER decode of `SEQUENCE { INTEGER r, INTEGER s }`. Rejects
/// truncated input, trailing bytes, non-minimal lengths or integers,
/// negative integers and integers wider than 256 bits.
RawSignature der_decode_signature(ByteView der);

/// Minimal DER encoding; inverse of der_decode_signature on canonical input.
Bytes der_encode_signature(const RawSignature& sig);

class PublicKey;

/// P-256 private scalar. Keys are usually derived from a seed so that a
/// network configuration reproduces the same identities on every host.
class PrivateKey {
 public:
  /// Throws RangeError unless 1 <= d < n.
  static PrivateKey from_scalar(const Scalar& d);
  /// Deterministic key from arbitrary seed material (hash-to-scalar).
  static PrivateKey derive(ByteView seed);

  const Scalar& scalar() const { return d_; }
  PublicKey public_key() const;

 private:
  explicit PrivateKey(const Scalar& d) : d_(d) {}
  Scalar d_;
};

/// Uncompressed SEC1 point (65 bytes) plus a parsed handle for the verifier.
class PublicKey {
 public:
  /// Throws DecodeError if the bytes are not a point on P-256.
  static PublicKey from_bytes(ByteView sec1);

  ByteView bytes() const { return bytes_; }

  /// Verifies an (r, s) pair. Out-of-range r or s yields false.
  bool verify(const Hash32& digest, const RawSignature& sig) const;

  bool operator==(const PublicKey& other) const { return bytes_ == other.bytes_; }

 private:
  PublicKey() = default;
  struct Handle;
  Bytes bytes_;
  std::shared_ptr<const Handle> handle_;
};

/// Deterministic ECDSA P-256 signature (RFC 6979 nonce) over a 32-byte
/// digest, DER encoded.
Bytes sign(const Hash32& digest, const PrivateKey& key);

/// Raw (r, s) form of sign(); exposed for known-answer tests.
RawSignature sign_raw(const Hash32& digest, const PrivateKey& key);

/// Verifies a DER signature. Malformed DER throws DecodeError; a
/// well-formed signature that does not match returns false.
bool verify(ByteView der_sig, const PublicKey& key, const Hash32& digest);

}  // namespace bmac
