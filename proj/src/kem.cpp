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

#include "qpauth/kem.hpp"

#include <stdexcept>

namespace qpauth::kem {

namespace {

constexpr const char* kProtocolError = "kem: malformed message";

uint16_t mod_q(uint32_t v, const KemParams& p) {
  return static_cast<uint16_t>(v & p.q_mask());
}

// Centered binomial: sum of eta coin pairs.
int16_t sample_cbd(const KemParams& p, crypto::Drbg& rng) {
  int acc = 0;
  for (int i = 0; i < p.eta; ++i) {
    const uint8_t b = rng.byte();
    acc += (b & 1) - ((b >> 1) & 1);
  }
  return static_cast<int16_t>(acc);
}

std::vector<int16_t> sample_cbd_matrix(const KemParams& p, int rows, int cols,
                                       crypto::Drbg& rng) {
  std::vector<int16_t> m(static_cast<std::size_t>(rows) * cols);
  for (auto& v : m) v = sample_cbd(p, rng);
  return m;
}

// Public matrix A (n x n), expanded row-set from the 16-byte seed.
std::vector<uint16_t> expand_a(const KemParams& p,
                               const std::array<uint8_t, 16>& seed_a) {
  crypto::Drbg xof(seed_a);
  std::vector<uint16_t> a(static_cast<std::size_t>(p.n) * p.n);
  for (auto& v : a) {
    const uint16_t lo = xof.byte();
    const uint16_t hi = xof.byte();
    v = mod_q(static_cast<uint32_t>(lo | (hi << 8)), p);
  }
  return a;
}

void pack16(crypto::Bytes& out, std::span<const uint16_t> vals) {
  for (uint16_t v : vals) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>(v >> 8));
  }
}

std::vector<uint16_t> unpack16(const KemParams& p,
                               std::span<const uint8_t> in,
                               std::size_t count) {
  if (in.size() != count * 2) throw std::runtime_error(kProtocolError);
  std::vector<uint16_t> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const uint16_t v =
        static_cast<uint16_t>(in[2 * i] | (in[2 * i + 1] << 8));
    if (v > p.q_mask()) throw std::runtime_error(kProtocolError);
    out[i] = v;
  }
  return out;
}

// 256-bit message <-> nbar x nbar block, msg_bits_per_entry bits per entry
// placed in the top bits of the modulus.
std::vector<uint16_t> encode_message(const KemParams& p,
                                     const std::array<uint8_t, 32>& msg) {
  const int entries = p.nbar * p.nbar;
  const int shift = p.qbits - p.msg_bits_per_entry;
  std::vector<uint16_t> out(entries, 0);
  for (int e = 0; e < entries; ++e) {
    uint16_t v = 0;
    for (int b = 0; b < p.msg_bits_per_entry; ++b) {
      const int bit = e * p.msg_bits_per_entry + b;
      v = static_cast<uint16_t>(
          (v << 1) | ((msg[bit / 8] >> (7 - bit % 8)) & 1));
    }
    out[e] = static_cast<uint16_t>(v << shift);
  }
  return out;
}

std::array<uint8_t, 32> decode_message(const KemParams& p,
                                       std::span<const uint16_t> block) {
  const int shift = p.qbits - p.msg_bits_per_entry;
  const uint16_t half_step = static_cast<uint16_t>(1u << (shift - 1));
  std::array<uint8_t, 32> msg{};
  for (int e = 0; e < p.nbar * p.nbar; ++e) {
    // Round to the nearest multiple of 2^shift mod q.
    const uint16_t rounded = mod_q(block[e] + half_step, p);
    const uint16_t v = static_cast<uint16_t>(rounded >> shift);
    for (int b = 0; b < p.msg_bits_per_entry; ++b) {
      const int bit = e * p.msg_bits_per_entry + b;
      const int val = (v >> (p.msg_bits_per_entry - 1 - b)) & 1;
      if (val) msg[bit / 8] |= static_cast<uint8_t>(0x80 >> (bit % 8));
    }
  }
  return msg;
}

SharedSecret finalize_secret(const KemParams& p,
                             const std::array<uint8_t, 32>& msg,
                             const KemCiphertext& ct) {
  crypto::Bytes material(msg.begin(), msg.end());
  const crypto::Digest ct_hash = crypto::sha256(ct.serialize(p));
  material.insert(material.end(), ct_hash.begin(), ct_hash.end());
  material.push_back(0x55);
  return crypto::sha256(material);
}

}  // namespace

KemParams KemParams::toy() {
  KemParams p;
  p.name = "toy";
  p.n = 64;
  return p;
}

KemParams KemParams::standard() {
  KemParams p;
  p.name = "default";
  p.n = 640;
  return p;
}

KemParams KemParams::by_name(const std::string& name) {
  if (name == "toy") return toy();
  if (name == "default") return standard();
  throw std::invalid_argument("unknown KEM profile: " + name);
}

uint8_t KemParams::wire_id() const { return n == 64 ? 0 : 1; }

KemParams KemParams::by_wire_id(uint8_t id) {
  if (id == 0) return toy();
  if (id == 1) return standard();
  throw std::runtime_error(kProtocolError);
}

crypto::Bytes KemPublicKey::serialize(const KemParams& p) const {
  crypto::Bytes out(seed_a.begin(), seed_a.end());
  pack16(out, b);
  (void)p;
  return out;
}

KemPublicKey KemPublicKey::parse(const KemParams& p,
                                 std::span<const uint8_t> in) {
  const std::size_t b_count = static_cast<std::size_t>(p.n) * p.nbar;
  if (in.size() != 16 + b_count * 2) throw std::runtime_error(kProtocolError);
  KemPublicKey pub;
  std::copy(in.begin(), in.begin() + 16, pub.seed_a.begin());
  pub.b = unpack16(p, in.subspan(16), b_count);
  return pub;
}

crypto::Bytes KemCiphertext::serialize(const KemParams& p) const {
  crypto::Bytes out;
  pack16(out, b_prime);
  pack16(out, c);
  (void)p;
  return out;
}

KemCiphertext KemCiphertext::parse(const KemParams& p,
                                   std::span<const uint8_t> in) {
  const std::size_t bp_count = static_cast<std::size_t>(p.nbar) * p.n;
  const std::size_t c_count = static_cast<std::size_t>(p.nbar) * p.nbar;
  if (in.size() != (bp_count + c_count) * 2) {
    throw std::runtime_error(kProtocolError);
  }
  KemCiphertext ct;
  ct.b_prime = unpack16(p, in.subspan(0, bp_count * 2), bp_count);
  ct.c = unpack16(p, in.subspan(bp_count * 2), c_count);
  return ct;
}

KemKeypair kem_keygen(const KemParams& params, uint64_t seed) {
  crypto::Drbg rng(seed);
  KemKeypair kp;
  kp.params = params;
  rng.fill(kp.pub.seed_a);
  const auto a = expand_a(params, kp.pub.seed_a);
  kp.sec.s = sample_cbd_matrix(params, params.n, params.nbar, rng);
  const auto e = sample_cbd_matrix(params, params.n, params.nbar, rng);

  // B = A*S + E (n x nbar)
  kp.pub.b.assign(static_cast<std::size_t>(params.n) * params.nbar, 0);
  for (int i = 0; i < params.n; ++i) {
    for (int j = 0; j < params.nbar; ++j) {
      int32_t acc = e[i * params.nbar + j];
      for (int k = 0; k < params.n; ++k) {
        acc += static_cast<int32_t>(a[i * params.n + k]) *
               kp.sec.s[k * params.nbar + j];
      }
      kp.pub.b[i * params.nbar + j] =
          mod_q(static_cast<uint32_t>(acc), params);
    }
  }
  return kp;
}

Encapsulated kem_encaps(const KemParams& params, const KemPublicKey& pub,
                        crypto::Drbg& rng) {
  std::array<uint8_t, 32> msg{};
  rng.fill(msg);
  // Derive all encryption randomness from the message and the public key,
  // so encapsulation is a deterministic function of (msg, pub).
  crypto::Bytes material(msg.begin(), msg.end());
  const auto pk_hash = crypto::sha256(pub.serialize(params));
  material.insert(material.end(), pk_hash.begin(), pk_hash.end());
  crypto::Drbg enc_rng(material);

  const auto a = expand_a(params, pub.seed_a);
  const auto s_prime =
      sample_cbd_matrix(params, params.nbar, params.n, enc_rng);
  const auto e_prime =
      sample_cbd_matrix(params, params.nbar, params.n, enc_rng);
  const auto e_second =
      sample_cbd_matrix(params, params.nbar, params.nbar, enc_rng);

  Encapsulated out;
  // B' = S'*A + E' (nbar x n)
  out.ct.b_prime.assign(static_cast<std::size_t>(params.nbar) * params.n, 0);
  for (int i = 0; i < params.nbar; ++i) {
    for (int j = 0; j < params.n; ++j) {
      int32_t acc = e_prime[i * params.n + j];
      for (int k = 0; k < params.n; ++k) {
        acc += static_cast<int32_t>(s_prime[i * params.n + k]) *
               a[k * params.n + j];
      }
      out.ct.b_prime[i * params.n + j] =
          mod_q(static_cast<uint32_t>(acc), params);
    }
  }
  // C = S'*B + E'' + encode(msg) (nbar x nbar)
  const auto encoded = encode_message(params, msg);
  out.ct.c.assign(static_cast<std::size_t>(params.nbar) * params.nbar, 0);
  for (int i = 0; i < params.nbar; ++i) {
    for (int j = 0; j < params.nbar; ++j) {
      int32_t acc = e_second[i * params.nbar + j] +
                    encoded[i * params.nbar + j];
      for (int k = 0; k < params.n; ++k) {
        acc += static_cast<int32_t>(s_prime[i * params.n + k]) *
               pub.b[k * params.nbar + j];
      }
      out.ct.c[i * params.nbar + j] =
          mod_q(static_cast<uint32_t>(acc), params);
    }
  }
  out.ss = finalize_secret(params, msg, out.ct);
  return out;
}

SharedSecret kem_decaps(const KemKeypair& keypair, const KemCiphertext& ct) {
  const KemParams& p = keypair.params;
  if (ct.b_prime.size() != static_cast<std::size_t>(p.nbar) * p.n ||
      ct.c.size() != static_cast<std::size_t>(p.nbar) * p.nbar) {
    throw std::runtime_error(kProtocolError);
  }
  // M = C - B'*S
  std::vector<uint16_t> m(static_cast<std::size_t>(p.nbar) * p.nbar);
  for (int i = 0; i < p.nbar; ++i) {
    for (int j = 0; j < p.nbar; ++j) {
      int32_t acc = ct.c[i * p.nbar + j];
      for (int k = 0; k < p.n; ++k) {
        acc -= static_cast<int32_t>(ct.b_prime[i * p.n + k]) *
               keypair.sec.s[k * p.nbar + j];
      }
      m[i * p.nbar + j] = mod_q(static_cast<uint32_t>(acc), p);
    }
  }
  return finalize_secret(p, decode_message(p, m), ct);
}

}  // namespace qpauth::kem
