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
#include <vector>

#include "qpauth/qcirc.hpp"

namespace qpauth::steane {

// [7,1,3] Steane code, built on the [7,4] Hamming code. Parity-check column
// j is the 3-bit binary representation of j+1 (row 0 holds the most
// significant bit), so a single flip on qubit j has syndrome binary(j+1).

inline constexpr int kBlockLen = 7;
inline constexpr int kSyndromeBits = 3;

inline constexpr std::array<std::array<uint8_t, kBlockLen>, kSyndromeBits>
    kParityCheck = {{
        {0, 0, 0, 1, 1, 1, 1},
        {0, 1, 1, 0, 0, 1, 1},
        {1, 0, 1, 0, 1, 0, 1},
    }};

using Word = std::array<uint8_t, kBlockLen>;
using Syndrome = std::array<uint8_t, kSyndromeBits>;

/// H * word over GF(2). Throws std::invalid_argument unless |word| == 7.
Syndrome classical_syndrome(std::span<const uint8_t> word);

bool is_codeword(std::span<const uint8_t> word);

/// Codeword with even Hamming weight. The 8 even codewords form the dual
/// (simplex) subcode; they are exactly the measurement support of the
/// encoded |0>.
bool is_even_codeword(std::span<const uint8_t> word);

/// All 16 codewords of the underlying Hamming code, ascending by value.
std::vector<Word> codewords();

/// Encoder fragment mapping |b,0,0,0,0,0,0> on qubits
/// [block_start, block_start+7) to the logical |b>. H and CNOT only; the
/// returned circuit spans `num_qubits` wires so fragments can be merged.
qcirc::Circuit encoder_fragment(int block_start, int num_qubits);

}  // namespace qpauth::steane
