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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qpauth::crypto {

using Bytes = std::vector<uint8_t>;
using Digest = std::array<uint8_t, 32>;
using AeadKey = std::array<uint8_t, 32>;
using AeadNonce = std::array<uint8_t, 12>;

inline constexpr std::size_t kTagLen = 16;

Digest sha256(std::span<const uint8_t> data);
Digest sha256(std::string_view data);
Bytes hmac_sha256(std::span<const uint8_t> key, std::span<const uint8_t> data);
bool constant_time_equal(std::span<const uint8_t> a,
                         std::span<const uint8_t> b);

std::string to_hex(std::span<const uint8_t> data);
Bytes from_hex(std::string_view hex);

/// AES-256-GCM. Returns ciphertext || 16-byte tag.
Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce,
                std::span<const uint8_t> plaintext,
                std::span<const uint8_t> aad);

/// Authentication failure is a value (nullopt), not an exception.
std::optional<Bytes> aead_open(const AeadKey& key, const AeadNonce& nonce,
                               std::span<const uint8_t> ciphertext_and_tag,
                               std::span<const uint8_t> aad);

/// Deterministic byte stream: block_i = SHA-256(seed || i). Used wherever
/// reproducible "random" bytes are needed (key expansion, KEM sampling,
/// seeded test drivers).
class Drbg {
 public:
  explicit Drbg(std::span<const uint8_t> seed);
  explicit Drbg(uint64_t seed);

  uint8_t byte();
  void fill(std::span<uint8_t> out);
  Bytes bytes(std::size_t n);
  uint64_t u64();
  /// Unbiased uniform draw in [0, n) by rejection.
  uint32_t below(uint32_t n);

 private:
  void refill();

  Digest seed_{};
  uint64_t counter_ = 0;
  Digest block_{};
  std::size_t used_ = sizeof(Digest);
};

/// System entropy (used only where determinism is not wanted, e.g. salts
/// and live protocol nonces; everything seeded goes through Drbg).
Bytes random_bytes(std::size_t n);

}  // namespace qpauth::crypto
