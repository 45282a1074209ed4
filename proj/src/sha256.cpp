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

#include "bmac/sha256.hpp"

#include <openssl/evp.h>

#include "bmac/error.hpp"

namespace bmac {

struct Sha256::Ctx {
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  ~Ctx() { EVP_MD_CTX_free(md); }
};

Sha256::Sha256() : ctx_(std::make_unique<Ctx>()) {
  if (ctx_->md == nullptr || EVP_DigestInit_ex(ctx_->md, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 init failed");
  }
}

Sha256::Sha256(const Sha256& other) : ctx_(std::make_unique<Ctx>()) {
  if (EVP_MD_CTX_copy_ex(ctx_->md, other.ctx_->md) != 1) throw Error("sha256 copy failed");
}

Sha256& Sha256::operator=(const Sha256& other) {
  if (this != &other) {
    if (EVP_MD_CTX_copy_ex(ctx_->md, other.ctx_->md) != 1) throw Error("sha256 copy failed");
  }
  return *this;
}

Sha256::~Sha256() = default;

Sha256& Sha256::update(ByteView data) {
  if (!data.empty()) EVP_DigestUpdate(ctx_->md, data.data(), data.size());
  return *this;
}

Hash32 Sha256::finish() {
  Hash32 out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx_->md, out.data(), &len);
  return out;
}

Hash32 Sha256::digest(ByteView data) { return Sha256().update(data).finish(); }

}  // namespace bmac
