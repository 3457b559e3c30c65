// Copyright 2026 The qpauth authors
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

#include "qpauth/crypto.hpp"

#include <cstring>
#include <stdexcept>

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

namespace qpauth::crypto {

Digest sha256(std::span<const uint8_t> data) {
  Digest out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Digest sha256(std::string_view data) {
  return sha256(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

Bytes hmac_sha256(std::span<const uint8_t> key,
                  std::span<const uint8_t> data) {
  Bytes out(32);
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
            data.data(), data.size(), out.data(), &len) ||
      len != 32) {
    throw std::runtime_error("HMAC-SHA256 failed");
  }
  return out;
}

bool constant_time_equal(std::span<const uint8_t> a,
                         std::span<const uint8_t> b) {
  if (a.size() != b.size()) return false;
  uint8_t acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc |= a[i] ^ b[i];
  return acc == 0;
}

std::string to_hex(std::span<const uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("invalid hex digit");
  };
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd hex length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<uint8_t>(nibble(hex[2 * i]) << 4 |
                                  nibble(hex[2 * i + 1]));
  }
  return out;
}

namespace {

struct CipherCtx {
  EVP_CIPHER_CTX* ctx;
  CipherCtx() : ctx(EVP_CIPHER_CTX_new()) {
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  }
  ~CipherCtx() { EVP_CIPHER_CTX_free(ctx); }
  CipherCtx(const CipherCtx&) = delete;
  CipherCtx& operator=(const CipherCtx&) = delete;
};

}  // namespace

Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce,
                std::span<const uint8_t> plaintext,
                std::span<const uint8_t> aad) {
  CipherCtx c;
  if (EVP_EncryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce.data()) != 1) {
    throw std::runtime_error("AES-GCM init failed");
  }
  int len = 0;
  if (!aad.empty() &&
      EVP_EncryptUpdate(c.ctx, nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    throw std::runtime_error("AES-GCM aad failed");
  }
  Bytes out(plaintext.size() + kTagLen);
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(c.ctx, out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    throw std::runtime_error("AES-GCM encrypt failed");
  }
  if (EVP_EncryptFinal_ex(c.ctx, out.data() + plaintext.size(), &len) != 1) {
    throw std::runtime_error("AES-GCM final failed");
  }
  if (EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_GET_TAG, kTagLen,
                          out.data() + plaintext.size()) != 1) {
    throw std::runtime_error("AES-GCM tag failed");
  }
  return out;
}

std::optional<Bytes> aead_open(const AeadKey& key, const AeadNonce& nonce,
                               std::span<const uint8_t> ciphertext_and_tag,
                               std::span<const uint8_t> aad) {
  if (ciphertext_and_tag.size() < kTagLen) return std::nullopt;
  const std::size_t ct_len = ciphertext_and_tag.size() - kTagLen;
  CipherCtx c;
  if (EVP_DecryptInit_ex(c.ctx, EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce.data()) != 1) {
    throw std::runtime_error("AES-GCM init failed");
  }
  int len = 0;
  if (!aad.empty() &&
      EVP_DecryptUpdate(c.ctx, nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    return std::nullopt;
  }
  Bytes out(ct_len);
  if (ct_len > 0 &&
      EVP_DecryptUpdate(c.ctx, out.data(), &len, ciphertext_and_tag.data(),
                        static_cast<int>(ct_len)) != 1) {
    return std::nullopt;
  }
  uint8_t tag[kTagLen];
  std::memcpy(tag, ciphertext_and_tag.data() + ct_len, kTagLen);
  if (EVP_CIPHER_CTX_ctrl(c.ctx, EVP_CTRL_GCM_SET_TAG, kTagLen, tag) != 1) {
    return std::nullopt;
  }
  if (EVP_DecryptFinal_ex(c.ctx, out.data() + ct_len, &len) != 1) {
    return std::nullopt;  // tag mismatch
  }
  return out;
}

Drbg::Drbg(std::span<const uint8_t> seed) { seed_ = sha256(seed); }

Drbg::Drbg(uint64_t seed) {
  uint8_t buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<uint8_t>(seed >> (8 * i));
  seed_ = sha256(std::span<const uint8_t>(buf, 8));
}

void Drbg::refill() {
  uint8_t buf[sizeof(Digest) + 8];
  std::memcpy(buf, seed_.data(), sizeof(Digest));
  for (int i = 0; i < 8; ++i) {
    buf[sizeof(Digest) + i] = static_cast<uint8_t>(counter_ >> (8 * i));
  }
  ++counter_;
  block_ = sha256(std::span<const uint8_t>(buf, sizeof(buf)));
  used_ = 0;
}

uint8_t Drbg::byte() {
  if (used_ >= sizeof(Digest)) refill();
  return block_[used_++];
}

void Drbg::fill(std::span<uint8_t> out) {
  for (auto& b : out) b = byte();
}

Bytes Drbg::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

uint64_t Drbg::u64() {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(byte()) << (8 * i);
  return v;
}

uint32_t Drbg::below(uint32_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  const uint32_t limit = UINT32_MAX - UINT32_MAX % n;
  for (;;) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(byte()) << (8 * i);
    if (v < limit) return v % n;
  }
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
  return out;
}

}  // namespace qpauth::crypto
