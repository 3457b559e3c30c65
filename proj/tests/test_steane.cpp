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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "qpauth/steane.hpp"
#include "test_util.hpp"

using namespace qpauth;
using steane::Word;

namespace {

Word word_of(const std::string& bits) {
  Word w{};
  for (int i = 0; i < steane::kBlockLen; ++i) w[i] = bits[i] == '1';
  return w;
}

int weight(const Word& w) {
  int acc = 0;
  for (auto b : w) acc += b;
  return acc;
}

std::set<std::string> support_of(const qcirc::StateVector& s) {
  std::set<std::string> out;
  std::vector<int> all(s.num_qubits);
  for (int q = 0; q < s.num_qubits; ++q) all[q] = q;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::norm(s.amps[i]) > 1e-20) {
      out.insert(qcirc::bits_of_index(i, s.num_qubits, all));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("syndrome spot values") {
  CHECK(steane::classical_syndrome(word_of("0000000")) ==
        steane::Syndrome{0, 0, 0});
  CHECK(steane::classical_syndrome(word_of("0000001")) ==
        steane::Syndrome{1, 1, 1});
  CHECK(steane::classical_syndrome(word_of("0001111")) ==
        steane::Syndrome{0, 0, 0});
  const std::vector<uint8_t> short_word{1, 0, 1};
  CHECK_THROWS_AS(steane::classical_syndrome(short_word),
                  std::invalid_argument);
}

TEST_CASE("single flips produce the binary column index") {
  for (int j = 0; j < steane::kBlockLen; ++j) {
    Word w{};
    w[j] = 1;
    const auto s = steane::classical_syndrome(w);
    const int value = s[0] * 4 + s[1] * 2 + s[2];
    CHECK(value == j + 1);
  }
}

TEST_CASE("membership spot values") {
  CHECK(steane::is_codeword(word_of("0000000")));
  CHECK(steane::is_even_codeword(word_of("0000000")));
  CHECK(steane::is_codeword(word_of("0001111")));
  CHECK(steane::is_even_codeword(word_of("0001111")));
  CHECK(!steane::is_codeword(word_of("1000000")));
  CHECK(!steane::is_even_codeword(word_of("1000000")));
  CHECK(steane::is_codeword(word_of("1110000")));
  CHECK(!steane::is_even_codeword(word_of("1110000")));  // weight 3
}

TEST_CASE("code size and distance by exhaustive enumeration") {
  int codewords = 0, even = 0;
  for (int v = 0; v < 128; ++v) {
    Word w{};
    for (int j = 0; j < 7; ++j) w[j] = (v >> (6 - j)) & 1;
    if (steane::is_codeword(w)) {
      ++codewords;
      if (weight(w) % 2 == 0) ++even;
      // Distance 3: no nonzero codeword of weight 1 or 2.
      if (v != 0) CHECK(weight(w) >= 3);
    }
  }
  CHECK(codewords == 16);
  CHECK(even == 8);
  CHECK(steane::codewords().size() == 16);
}

TEST_CASE("every weight-1 and weight-2 error is detected") {
  for (int a = 0; a < 7; ++a) {
    for (int b = a; b < 7; ++b) {
      Word w{};
      w[a] ^= 1;
      w[b] ^= 1;
      if (a == b) w[a] = 1;  // weight-1 case
      const auto s = steane::classical_syndrome(w);
      const bool zero = s[0] == 0 && s[1] == 0 && s[2] == 0;
      if (a == b || a != b) {
        if (weight(w) > 0) CHECK(!zero);
      }
    }
  }
}

TEST_CASE("encoder produces the logical codeword superpositions") {
  const auto enc = steane::encoder_fragment(0, 7);

  // |0>_L: support is exactly the even subcode, uniform amplitudes.
  const auto zero_state = qcirc::run_ideal(enc);
  std::set<std::string> even_words, all_words;
  for (const auto& w : steane::codewords()) {
    std::string bits(7, '0');
    int wt = 0;
    for (int j = 0; j < 7; ++j) {
      bits[j] = w[j] ? '1' : '0';
      wt += w[j];
    }
    all_words.insert(bits);
    if (wt % 2 == 0) even_words.insert(bits);
  }
  CHECK(support_of(zero_state) == even_words);
  for (std::size_t i = 0; i < zero_state.size(); ++i) {
    const double p = std::norm(zero_state.amps[i]);
    if (p > 1e-20) CHECK(std::abs(p - 1.0 / 8.0) < 1e-12);
  }

  // |1>_L: the complementary coset, disjoint from the |0>_L support.
  qcirc::StateVector one_in = qcirc::StateVector::zero(7);
  qcirc::apply_gate(one_in, qcirc::Gate::x(0));
  for (const auto& g : enc.gates) qcirc::apply_gate(one_in, g);
  const auto one_support = support_of(one_in);
  CHECK(one_support.size() == 8);
  for (const auto& bits : one_support) {
    CHECK(all_words.count(bits) == 1);
    CHECK(even_words.count(bits) == 0);
  }
}

TEST_CASE("encoder inverse restores the input") {
  const auto enc = steane::encoder_fragment(0, 7);
  for (int b = 0; b < 2; ++b) {
    qcirc::StateVector s = qcirc::StateVector::zero(7);
    if (b) qcirc::apply_gate(s, qcirc::Gate::x(0));
    const qcirc::StateVector original = s;
    for (const auto& g : enc.gates) qcirc::apply_gate(s, g);
    for (auto it = enc.gates.rbegin(); it != enc.gates.rend(); ++it) {
      qcirc::apply_gate(s, *it);  // H and CNOT are self-inverse
    }
    CHECK(testutil::max_diff_up_to_phase(original, s) < 1e-12);
  }
}

TEST_CASE("encoder measurement support matches the classical subcode") {
  qcirc::Circuit c(7);
  for (const auto& g : steane::encoder_fragment(0, 7).gates) c.push(g);
  c.measure_all();
  const auto counts = qcirc::sample(c, 10000, 2);
  for (const auto& [bits, n] : counts.counts) {
    CHECK(steane::is_even_codeword(word_of(bits)));
  }
  CHECK(counts.counts.size() == 8);
}

TEST_CASE("encoder fragment validates the block bounds") {
  CHECK_THROWS_AS(steane::encoder_fragment(10, 14), std::invalid_argument);
  const auto frag = steane::encoder_fragment(7, 14);
  for (const auto& g : frag.gates) {
    CHECK(g.q0 >= 7);
    if (g.two_qubit()) CHECK(g.q1 >= 7);
  }
}
