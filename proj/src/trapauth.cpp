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

#include "qpauth/trapauth.hpp"

#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qpauth/crypto.hpp"
#include "qpauth/steane.hpp"

namespace qpauth::trapauth {

namespace {

std::vector<uint8_t> pack_bits(std::span<const uint8_t> bits) {
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1) out[i / 8] |= static_cast<uint8_t>(0x80 >> (i % 8));
  }
  return out;
}

uint8_t bit_of(const crypto::Digest& d, int i) {
  return (d[i / 8] >> (7 - i % 8)) & 1;
}

void append(qcirc::Circuit& dst, const qcirc::Circuit& src) {
  for (const auto& g : src.gates) dst.push(g);
}

// Identity-layout program: trap initialization, the two encoder fragments,
// and optionally the explicit one-time pad. The pad encrypts the encoded
// qubits; key bit q acts on the wire carrying logical position q. (Placing
// the pad before encoding would leave Z keys acting on |0> inputs, where
// they do nothing.)
qcirc::Circuit canonical_program(const KeySet& keys, bool explicit_otp) {
  qcirc::Circuit c(kProgramQubits);
  c.push(qcirc::Gate::h(kPlusTrap));
  append(c, steane::encoder_fragment(kZeroTrap, kProgramQubits));
  append(c, steane::encoder_fragment(kPlusTrap, kProgramQubits));
  if (explicit_otp) {
    for (int q = 0; q < kProgramQubits; ++q) {
      if (keys.x_keys[q]) c.push(qcirc::Gate::x(q));
      if (keys.z_keys[q]) c.push(qcirc::Gate::z(q));
    }
  }
  return c;
}

std::string program_id_for(const KeySet& keys) {
  std::vector<uint8_t> material(keys.salt.begin(), keys.salt.end());
  const char* label = "program-id";
  material.insert(material.end(), label, label + 10);
  const auto digest = crypto::sha256(material);
  return crypto::to_hex(std::span<const uint8_t>(digest.data(), 8));
}

}  // namespace

nlohmann::json KeySet::to_json() const {
  nlohmann::json j;
  j["x_keys"] = crypto::to_hex(pack_bits(x_keys));
  j["z_keys"] = crypto::to_hex(pack_bits(z_keys));
  j["perm"] = std::vector<int>(perm.begin(), perm.end());
  j["salt"] = crypto::to_hex(salt);
  return j;
}

KeySet KeySet::from_json(const nlohmann::json& j) {
  KeySet k;
  const auto unpack = [](const std::string& hex, KeyBits& out) {
    const auto bytes = crypto::from_hex(hex);
    if (bytes.size() != 2) throw std::invalid_argument("bad key bits");
    for (int i = 0; i < kProgramQubits; ++i) {
      out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
    }
  };
  unpack(j.at("x_keys").get<std::string>(), k.x_keys);
  unpack(j.at("z_keys").get<std::string>(), k.z_keys);
  const auto perm = j.at("perm").get<std::vector<int>>();
  if (perm.size() != kProgramQubits) {
    throw std::invalid_argument("bad permutation length");
  }
  std::array<bool, kProgramQubits> seen{};
  for (int i = 0; i < kProgramQubits; ++i) {
    if (perm[i] < 0 || perm[i] >= kProgramQubits || seen[perm[i]]) {
      throw std::invalid_argument("permutation is not a bijection");
    }
    seen[perm[i]] = true;
    k.perm[i] = static_cast<uint8_t>(perm[i]);
  }
  const auto salt = crypto::from_hex(j.at("salt").get<std::string>());
  if (salt.size() != k.salt.size()) throw std::invalid_argument("bad salt");
  std::copy(salt.begin(), salt.end(), k.salt.begin());
  return k;
}

std::vector<uint8_t> point_of(const Password& password) {
  if (password.text.empty()) {
    throw std::invalid_argument("password must be non-empty");
  }
  if (password.point_bits < 1) {
    throw std::invalid_argument("point length must be >= 1");
  }
  std::vector<uint8_t> bits(password.point_bits);
  crypto::Drbg stream(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(password.text.data()),
      password.text.size()));
  for (int i = 0; i < password.point_bits; ++i) bits[i] = stream.byte() & 1;
  return bits;
}

KeySet derive_keys_from_point(std::span<const uint8_t> point,
                              const Salt& salt) {
  if (point.empty()) throw std::invalid_argument("empty point");
  std::vector<uint8_t> material = pack_bits(point);
  material.insert(material.end(), salt.begin(), salt.end());
  const crypto::Digest block = crypto::sha256(material);

  KeySet keys;
  keys.salt = salt;
  for (int i = 0; i < kProgramQubits; ++i) {
    keys.x_keys[i] = bit_of(block, i);
    keys.z_keys[i] = bit_of(block, kProgramQubits + i);
  }
  // Remaining digest bytes seed the shuffle.
  crypto::Drbg shuffle(std::span<const uint8_t>(block.data() + 4, 28));
  std::iota(keys.perm.begin(), keys.perm.end(), 0);
  for (int i = kProgramQubits - 1; i > 0; --i) {
    const uint32_t j = shuffle.below(static_cast<uint32_t>(i + 1));
    std::swap(keys.perm[i], keys.perm[j]);
  }
  return keys;
}

KeySet derive_keys(const Password& password, const Salt& salt) {
  return derive_keys_from_point(point_of(password), salt);
}

PreparedProgram prepare_program(const KeySet& keys, bool delegated) {
  PreparedProgram out;
  out.program.program_id = program_id_for(keys);
  out.program.circuit =
      remap_wires(canonical_program(keys, !delegated), keys.perm);
  out.frame = qcirc::PauliFrame(kProgramQubits);
  if (delegated) {
    // The pad already sits at the measurement end of the program circuit,
    // so the frame is the key material itself, in wire coordinates.
    for (int q = 0; q < kProgramQubits; ++q) {
      out.frame.x[keys.perm[q]] = keys.x_keys[q];
      out.frame.z[keys.perm[q]] = keys.z_keys[q];
    }
  }
  return out;
}

PreparedProgram prepare_program_swap_variant(const KeySet& keys) {
  PreparedProgram out;
  out.program.program_id = program_id_for(keys);
  out.program.circuit = canonical_program(keys, /*explicit_otp=*/true);
  append(out.program.circuit, swap_network(keys.perm, kProgramQubits));
  out.frame = qcirc::PauliFrame(kProgramQubits);
  return out;
}

qcirc::PauliFrame commute_frame(const qcirc::Circuit& circuit,
                                const qcirc::PauliFrame& initial) {
  return qcirc::propagate_through(circuit, initial);
}

qcirc::Circuit remap_wires(const qcirc::Circuit& fragment,
                           std::span<const uint8_t> perm) {
  if (perm.size() != static_cast<std::size_t>(fragment.num_qubits)) {
    throw std::invalid_argument("permutation width must match fragment");
  }
  qcirc::Circuit out(fragment.num_qubits);
  for (const auto& g : fragment.gates) {
    qcirc::Gate m = g;
    m.q0 = perm[g.q0];
    if (g.two_qubit()) m.q1 = perm[g.q1];
    out.push(m);
  }
  for (int q : fragment.measured) out.measure(perm[q]);
  return out;
}

qcirc::Circuit swap_network(std::span<const uint8_t> perm, int num_qubits) {
  if (perm.size() != static_cast<std::size_t>(num_qubits)) {
    throw std::invalid_argument("permutation width must match register");
  }
  // Two layers of disjoint transpositions realize any permutation: each
  // cycle's shift factors into the involutions i -> -i and i -> 1-i.
  qcirc::Circuit net(num_qubits);
  std::vector<qcirc::Gate> second_layer;
  std::vector<bool> visited(num_qubits, false);
  for (int start = 0; start < num_qubits; ++start) {
    if (visited[start]) continue;
    std::vector<int> cycle;
    for (int cur = start; !visited[cur]; cur = perm[cur]) {
      visited[cur] = true;
      cycle.push_back(cur);
    }
    const int len = static_cast<int>(cycle.size());
    if (len < 2) continue;
    for (int i = 1; 2 * i < len; ++i) {  // i <-> (len - i) mod len
      net.push(qcirc::Gate::swap(cycle[i], cycle[len - i]));
    }
    for (int i = 0; i < len; ++i) {  // i <-> (1 - i) mod len
      const int j = (1 - i % len + len) % len;
      if (i < j) second_layer.push_back(qcirc::Gate::swap(cycle[i], cycle[j]));
    }
  }
  for (const auto& g : second_layer) net.push(g);
  return net;
}

qcirc::Circuit trap_encoding_circuit() {
  return canonical_program(KeySet{}, /*explicit_otp=*/false);
}

Perm identity_perm() {
  Perm p{};
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Perm inverse_perm(const Perm& perm) {
  Perm inv{};
  for (int q = 0; q < kProgramQubits; ++q) inv[perm[q]] = q;
  return inv;
}

}  // namespace qpauth::trapauth
