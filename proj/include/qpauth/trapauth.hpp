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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qpauth/qcirc.hpp"

namespace qpauth::trapauth {

// The password program holds two trap blocks: a |0> trap on logical
// positions 0..6 and a |+> trap on logical positions 7..13, each encoded
// with the Steane code. One-time-pad key bit q and the wire permutation are
// indexed by logical position; perm[q] is the physical wire carrying
// logical position q.

inline constexpr int kProgramQubits = 14;
inline constexpr int kZeroTrap = 0;   // logical position of the |0> trap
inline constexpr int kPlusTrap = 7;   // logical position of the |+> trap

struct Password {
  std::string text;
  int point_bits = 256;
};

using Salt = std::array<uint8_t, 16>;
using Perm = std::array<uint8_t, kProgramQubits>;
using KeyBits = std::array<uint8_t, kProgramQubits>;

struct KeySet {
  KeyBits x_keys{};
  KeyBits z_keys{};
  Perm perm{};
  Salt salt{};

  bool operator==(const KeySet&) const = default;
  nlohmann::json to_json() const;
  static KeySet from_json(const nlohmann::json& j);
};

/// The n-bit point of the point function, derived from the password text by
/// a SHA-256 output stream truncated to n bits. Returned as one byte per
/// bit.
std::vector<uint8_t> point_of(const Password& password);

/// Deterministic key material for a point: the first 14 bits of
/// SHA-256(point || salt) become the X keys, the next 14 the Z keys, and
/// the remaining output seeds a Fisher-Yates shuffle for the permutation.
KeySet derive_keys_from_point(std::span<const uint8_t> point,
                              const Salt& salt);
KeySet derive_keys(const Password& password, const Salt& salt);

struct PasswordProgram {
  qcirc::Circuit circuit;
  std::string program_id;
};

struct PreparedProgram {
  PasswordProgram program;
  /// Pending one-time pad at the end of the program circuit. In delegated
  /// mode this is where the pad lives; in explicit mode it is the identity.
  qcirc::PauliFrame frame;
};

/// Builds the password program. The pad encrypts the encoded, permuted
/// qubits: with delegated=false it appears as explicit terminal X/Z gates;
/// with delegated=true the circuit omits them and the pad is returned as a
/// Pauli frame to be handled classically after measurement. Either way the
/// whole circuit has every operand remapped through keys.perm.
PreparedProgram prepare_program(const KeySet& keys, bool delegated);

/// The unoptimized construction kept for comparison: explicit one-time pad
/// and an identity-layout circuit followed by a SWAP network that realizes
/// the permutation in place.
PreparedProgram prepare_program_swap_variant(const KeySet& keys);

/// Terminal frame f' with U P(f) = P(f') U up to global phase.
qcirc::PauliFrame commute_frame(const qcirc::Circuit& circuit,
                                const qcirc::PauliFrame& initial);

/// Replaces every gate operand q by perm[q]. No SWAP gates are introduced.
qcirc::Circuit remap_wires(const qcirc::Circuit& fragment,
                           std::span<const uint8_t> perm);

/// SWAP sequence moving the content of wire q to wire perm[q], one cycle at
/// a time.
qcirc::Circuit swap_network(std::span<const uint8_t> perm, int num_qubits);

/// Identity-layout trap initialization plus the two encoder fragments,
/// with no pad section.
qcirc::Circuit trap_encoding_circuit();

Perm identity_perm();
Perm inverse_perm(const Perm& perm);

}  // namespace qpauth::trapauth
