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

#include "qpauth/steane.hpp"

#include <stdexcept>

namespace qpauth::steane {

Syndrome classical_syndrome(std::span<const uint8_t> word) {
  if (word.size() != kBlockLen) {
    throw std::invalid_argument("syndrome input must have 7 bits");
  }
  Syndrome s{};
  for (int r = 0; r < kSyndromeBits; ++r) {
    uint8_t acc = 0;
    for (int j = 0; j < kBlockLen; ++j) {
      acc ^= static_cast<uint8_t>(kParityCheck[r][j] & (word[j] & 1));
    }
    s[r] = acc;
  }
  return s;
}

bool is_codeword(std::span<const uint8_t> word) {
  const Syndrome s = classical_syndrome(word);
  return s[0] == 0 && s[1] == 0 && s[2] == 0;
}

bool is_even_codeword(std::span<const uint8_t> word) {
  if (!is_codeword(word)) return false;
  int weight = 0;
  for (uint8_t b : word) weight += b & 1;
  return weight % 2 == 0;
}

std::vector<Word> codewords() {
  std::vector<Word> result;
  for (int v = 0; v < (1 << kBlockLen); ++v) {
    Word w{};
    for (int j = 0; j < kBlockLen; ++j) w[j] = (v >> (kBlockLen - 1 - j)) & 1;
    if (is_codeword(w)) result.push_back(w);
  }
  return result;
}

qcirc::Circuit encoder_fragment(int block_start, int num_qubits) {
  if (block_start < 0 || block_start + kBlockLen > num_qubits) {
    throw std::invalid_argument("encoder block exceeds circuit width");
  }
  qcirc::Circuit c(num_qubits);
  const int b = block_start;
  // Fan out the logical representative 1110000 from the input qubit, then
  // superpose the three dual-subcode generators (1101001, 1010101, 0110011)
  // from qubits b+3, b+4, b+5.
  c.push(qcirc::Gate::cnot(b + 0, b + 1));
  c.push(qcirc::Gate::cnot(b + 0, b + 2));
  c.push(qcirc::Gate::h(b + 3));
  c.push(qcirc::Gate::h(b + 4));
  c.push(qcirc::Gate::h(b + 5));
  c.push(qcirc::Gate::cnot(b + 3, b + 0));
  c.push(qcirc::Gate::cnot(b + 3, b + 1));
  c.push(qcirc::Gate::cnot(b + 3, b + 6));
  c.push(qcirc::Gate::cnot(b + 4, b + 0));
  c.push(qcirc::Gate::cnot(b + 4, b + 2));
  c.push(qcirc::Gate::cnot(b + 4, b + 6));
  c.push(qcirc::Gate::cnot(b + 5, b + 1));
  c.push(qcirc::Gate::cnot(b + 5, b + 2));
  c.push(qcirc::Gate::cnot(b + 5, b + 6));
  return c;
}

}  // namespace qpauth::steane
