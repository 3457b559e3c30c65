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
#include <string>
#include <vector>

#include "qpauth/crypto.hpp"

namespace qpauth::kem {

// Plain-LWE key encapsulation in the FrodoKEM mold: A is expanded from a
// public seed, secrets and errors are centered-binomial, and the 256-bit
// message is encoded into the top 4 bits of an 8x8 block. These profiles
// are desk-scale stand-ins and do not interoperate with any standard wire
// format.
//
// Decryption failure: each decoded entry carries noise
// sum_{i<2n}(s*e) + e'' with |s|,|e| <= eta and Var = (eta/2)^2 per term; a
// Bernstein bound puts P(|noise| >= q/32) below 2^-280 (toy) and 2^-190
// (default), far under the 2^-40 budget.

struct KemParams {
  std::string name;
  int n = 64;             // lattice dimension
  int nbar = 8;           // secret block width; nbar^2 entries carry the key
  int qbits = 15;         // modulus 2^qbits
  int eta = 2;            // centered binomial parameter
  int msg_bits_per_entry = 4;

  uint16_t q_mask() const { return static_cast<uint16_t>((1u << qbits) - 1); }

  static KemParams toy();       // n = 64, fast enough for exhaustive tests
  static KemParams standard();  // n = 640 service profile
  static KemParams by_name(const std::string& name);
  uint8_t wire_id() const;
  static KemParams by_wire_id(uint8_t id);
};

struct KemPublicKey {
  std::array<uint8_t, 16> seed_a{};
  std::vector<uint16_t> b;  // n x nbar, row-major

  crypto::Bytes serialize(const KemParams& p) const;
  static KemPublicKey parse(const KemParams& p, std::span<const uint8_t> in);
};

struct KemSecretKey {
  std::vector<int16_t> s;  // n x nbar, row-major
};

struct KemKeypair {
  KemParams params;
  KemPublicKey pub;
  KemSecretKey sec;
};

struct KemCiphertext {
  std::vector<uint16_t> b_prime;  // nbar x n
  std::vector<uint16_t> c;        // nbar x nbar

  crypto::Bytes serialize(const KemParams& p) const;
  static KemCiphertext parse(const KemParams& p, std::span<const uint8_t> in);
};

using SharedSecret = std::array<uint8_t, 32>;

struct Encapsulated {
  KemCiphertext ct;
  SharedSecret ss;
};

KemKeypair kem_keygen(const KemParams& params, uint64_t seed);
Encapsulated kem_encaps(const KemParams& params, const KemPublicKey& pub,
                        crypto::Drbg& rng);
/// The shared secret binds the ciphertext hash, so any tampered ciphertext
/// decapsulates to an unrelated secret rather than an error.
SharedSecret kem_decaps(const KemKeypair& keypair, const KemCiphertext& ct);

}  // namespace qpauth::kem
