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
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "qpauth/steane.hpp"
#include "qpauth/trapauth.hpp"
#include "test_util.hpp"

using namespace qpauth;
using trapauth::KeySet;
using trapauth::Password;

namespace {

KeySet random_keys(uint64_t id) {
  return trapauth::derive_keys(Password{"user-" + std::to_string(id)},
                               testutil::salt_from(id));
}

qcirc::StateVector with_terminal_frame(qcirc::StateVector s,
                                       const qcirc::PauliFrame& f) {
  for (int q = 0; q < f.num_qubits(); ++q) {
    if (f.x[q]) qcirc::apply_gate(s, qcirc::Gate::x(q));
    if (f.z[q]) qcirc::apply_gate(s, qcirc::Gate::z(q));
  }
  return s;
}

uint64_t fingerprint(const KeySet& k) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint8_t b) { h = (h ^ b) * 1099511628211ull; };
  for (auto b : k.x_keys) mix(b);
  for (auto b : k.z_keys) mix(b);
  for (auto b : k.perm) mix(b);
  return h;
}

}  // namespace

TEST_CASE("derive_keys is deterministic") {
  const auto salt = testutil::salt_from(9);
  const auto a = trapauth::derive_keys(Password{"hunter2"}, salt);
  const auto b = trapauth::derive_keys(Password{"hunter2"}, salt);
  CHECK(a == b);
  const auto c = trapauth::derive_keys(Password{"hunter3"}, salt);
  CHECK(a != c);
  CHECK_THROWS_AS(trapauth::derive_keys(Password{""}, salt),
                  std::invalid_argument);
}

TEST_CASE("no keyset collisions across many passwords") {
  std::unordered_set<uint64_t> seen;
  const auto salt = testutil::salt_from(1);
  for (int i = 0; i < 10000; ++i) {
    const auto k =
        trapauth::derive_keys(Password{"pw" + std::to_string(i)}, salt);
    CHECK(seen.insert(fingerprint(k)).second);
  }
}

TEST_CASE("key bits are roughly balanced") {
  const auto salt = testutil::salt_from(2);
  std::array<int, trapauth::kProgramQubits> ones{};
  const int rounds = 10000;
  for (int i = 0; i < rounds; ++i) {
    const auto k =
        trapauth::derive_keys(Password{"bal" + std::to_string(i)}, salt);
    for (int q = 0; q < trapauth::kProgramQubits; ++q) ones[q] += k.x_keys[q];
  }
  for (int q = 0; q < trapauth::kProgramQubits; ++q) {
    const double mean = static_cast<double>(ones[q]) / rounds;
    CHECK(mean > 0.45);
    CHECK(mean < 0.55);
  }
}

TEST_CASE("derived permutations are bijections") {
  for (uint64_t i = 0; i < 200; ++i) {
    const auto k = random_keys(i);
    std::set<uint8_t> image(k.perm.begin(), k.perm.end());
    CHECK(image.size() == trapauth::kProgramQubits);
  }
}

TEST_CASE("zero keys and identity permutation give the bare trap circuit") {
  KeySet zero{};
  zero.perm = trapauth::identity_perm();
  const auto prepared = trapauth::prepare_program(zero, /*delegated=*/false);
  const auto bare = trapauth::trap_encoding_circuit();
  CHECK(prepared.program.circuit.gates == bare.gates);
  CHECK(prepared.frame.identity());

  // Support check: block 1 reads even-subcode words, block 2 any codeword.
  qcirc::Circuit c = prepared.program.circuit;
  c.measure_all();
  const auto dist = qcirc::ideal_distribution(c);
  CHECK(dist.size() == 8 * 16);
  for (const auto& [bits, p] : dist) {
    steane::Word b1{}, b2{};
    for (int j = 0; j < 7; ++j) {
      b1[j] = bits[j] == '1';
      b2[j] = bits[7 + j] == '1';
    }
    CHECK(steane::is_even_codeword(b1));
    CHECK(steane::is_codeword(b2));
  }
}

TEST_CASE("delegated and explicit programs agree up to the returned frame") {
  for (uint64_t i = 0; i < 100; ++i) {
    const auto keys = random_keys(i);
    const auto delegated = trapauth::prepare_program(keys, true);
    const auto explicit_otp = trapauth::prepare_program(keys, false);
    CHECK(explicit_otp.frame.identity());

    const auto lhs = qcirc::run_ideal(explicit_otp.program.circuit);
    const auto rhs = with_terminal_frame(
        qcirc::run_ideal(delegated.program.circuit), delegated.frame);
    CHECK(testutil::max_diff_up_to_phase(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("single x key shifts block 1 off the subcode with a fixed syndrome") {
  KeySet keys{};
  keys.perm = trapauth::identity_perm();
  keys.x_keys[0] = 1;
  const auto prepared = trapauth::prepare_program(keys, false);
  qcirc::Circuit c = prepared.program.circuit;
  for (int q = 0; q < 7; ++q) c.measure(q);
  const auto dist = qcirc::ideal_distribution(c);
  CHECK(dist.size() == 8);
  for (const auto& [bits, p] : dist) {
    steane::Word w{};
    int weight = 0;
    for (int j = 0; j < 7; ++j) {
      w[j] = bits[j] == '1';
      weight += w[j];
    }
    // Even subcode shifted by e0: odd weight, syndrome = column 0.
    CHECK(weight % 2 == 1);
    CHECK(!steane::is_codeword(w));
    CHECK(steane::classical_syndrome(w) == steane::Syndrome{0, 0, 1});
  }
}

TEST_CASE("commute_frame matches the textbook rules") {
  qcirc::PauliFrame f(trapauth::kProgramQubits);
  f.x[3] = 1;
  qcirc::Circuit c(trapauth::kProgramQubits);

  SUBCASE("empty circuit") {
    CHECK(trapauth::commute_frame(c, f) == f);
  }
  SUBCASE("H turns X into Z") {
    c.push(qcirc::Gate::h(3));
    const auto out = trapauth::commute_frame(c, f);
    CHECK(out.x[3] == 0);
    CHECK(out.z[3] == 1);
  }
  SUBCASE("control X spreads to the target") {
    c.push(qcirc::Gate::cnot(3, 5));
    const auto out = trapauth::commute_frame(c, f);
    CHECK(out.x[3] == 1);
    CHECK(out.x[5] == 1);
  }
}

TEST_CASE("remap by a permutation and its inverse round-trips") {
  const auto keys = random_keys(77);
  const auto frag = trapauth::trap_encoding_circuit();
  const auto mapped = trapauth::remap_wires(frag, keys.perm);
  const auto back =
      trapauth::remap_wires(mapped, trapauth::inverse_perm(keys.perm));
  CHECK(back.gates == frag.gates);
  CHECK(trapauth::remap_wires(frag, trapauth::identity_perm()).gates ==
        frag.gates);
}

TEST_CASE("swap network places wire contents at the permuted positions") {
  Rng rng(55);
  for (int round = 0; round < 30; ++round) {
    trapauth::Perm perm = trapauth::identity_perm();
    for (int i = trapauth::kProgramQubits - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.below(i + 1)]);
    }
    const auto net = trapauth::swap_network(perm, trapauth::kProgramQubits);
    CHECK(qcirc::depth(net) <= 2);

    // Random basis input: bit of wire q must move to wire perm[q].
    uint64_t input = 0;
    for (int q = 0; q < trapauth::kProgramQubits; ++q) {
      if (rng.below(2)) input |= 1ull << (trapauth::kProgramQubits - 1 - q);
    }
    qcirc::StateVector s = qcirc::StateVector::zero(trapauth::kProgramQubits);
    s.amps[0] = 0;
    s.amps[input] = 1;
    for (const auto& g : net.gates) qcirc::apply_gate(s, g);
    uint64_t expected = 0;
    for (int q = 0; q < trapauth::kProgramQubits; ++q) {
      if (input & (1ull << (trapauth::kProgramQubits - 1 - q))) {
        expected |= 1ull << (trapauth::kProgramQubits - 1 - perm[q]);
      }
    }
    CHECK(std::abs(s.amps[expected] - 1.0) < 1e-12);
  }
}

TEST_CASE("wire remapping equals the explicit swap realization") {
  for (uint64_t i = 0; i < 100; ++i) {
    const auto keys = random_keys(i + 1000);
    const auto remapped = trapauth::prepare_program(keys, false);
    const auto swapped = trapauth::prepare_program_swap_variant(keys);
    const auto a = qcirc::run_ideal(remapped.program.circuit);
    const auto b = qcirc::run_ideal(swapped.program.circuit);
    CHECK(testutil::max_diff_up_to_phase(a, b) < 1e-12);
  }
}

TEST_CASE("delegated circuits never encode the pad keys") {
  auto keys_a = random_keys(5);
  auto keys_b = keys_a;
  keys_b.x_keys[2] ^= 1;
  keys_b.z_keys[9] ^= 1;
  keys_b.x_keys[13] ^= 1;
  const auto a = trapauth::prepare_program(keys_a, true);
  const auto b = trapauth::prepare_program(keys_b, true);
  CHECK(a.program.circuit.gates == b.program.circuit.gates);
  CHECK(!(a.frame == b.frame));
}

TEST_CASE("keyset json round trip") {
  const auto keys = random_keys(3);
  const auto j = keys.to_json();
  const auto back = trapauth::KeySet::from_json(j);
  CHECK(back == keys);

  auto bad = j;
  bad["perm"] = std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 12};
  CHECK_THROWS_AS(trapauth::KeySet::from_json(bad), std::invalid_argument);
}

TEST_CASE("point derivation length and determinism") {
  const auto p1 = trapauth::point_of(Password{"abc", 256});
  CHECK(p1.size() == 256);
  const auto p2 = trapauth::point_of(Password{"abc", 256});
  CHECK(p1 == p2);
  const auto p3 = trapauth::point_of(Password{"abd", 256});
  CHECK(p1 != p3);
  const auto small = trapauth::point_of(Password{"abc", 8});
  CHECK(small.size() == 8);
}
