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

#include <nlohmann/json.hpp>

#include "qpauth/steane.hpp"
#include "qpauth/verify.hpp"
#include "test_util.hpp"

using namespace qpauth;
using trapauth::KeySet;
using trapauth::Password;
using verify::VerificationMode;

namespace {

KeySet keys_for(uint64_t id) {
  return trapauth::derive_keys(Password{"verify-" + std::to_string(id)},
                               testutil::salt_from(id));
}

verify::VerificationOutcome run_pipeline(const KeySet& program_keys,
                                         const KeySet& attempt,
                                         VerificationMode mode, uint64_t shots,
                                         uint64_t seed,
                                         const qcirc::NoiseModel* noise) {
  const auto prepared = trapauth::prepare_program(program_keys, true);
  const auto circuit =
      verify::build_verification(prepared.program, attempt, mode);
  const auto raw =
      noise ? qcirc::sample(circuit, shots, *noise, seed)
            : qcirc::sample(circuit, shots, seed);
  return verify::postprocess(raw, attempt, prepared.frame, mode);
}

}  // namespace

TEST_CASE("verification circuit structure") {
  const auto keys = keys_for(1);
  const auto prepared = trapauth::prepare_program(keys, true);
  const auto phase = verify::build_verification(prepared.program, keys,
                                                VerificationMode::PhaseOnly);
  CHECK(phase.num_qubits == 20);
  CHECK(phase.measured.size() == 6);
  const auto both = verify::build_verification(prepared.program, keys,
                                               VerificationMode::BitAndPhase);
  CHECK(both.measured.size() == 20);

  trapauth::PasswordProgram bogus;
  bogus.circuit = qcirc::Circuit(7);
  CHECK_THROWS_AS(
      verify::build_verification(bogus, keys, VerificationMode::PhaseOnly),
      std::invalid_argument);
}

TEST_CASE("correct attempt passes every shot on the ideal backend") {
  for (uint64_t i = 0; i < 4; ++i) {
    const auto keys = keys_for(i);
    for (auto mode :
         {VerificationMode::PhaseOnly, VerificationMode::BitAndPhase}) {
      const auto outcome = run_pipeline(keys, keys, mode, 5000, 17 + i,
                                        nullptr);
      CHECK(outcome.pass_fraction == 1.0);
      CHECK(outcome.shots == 5000);
      // Post-processed syndromes are exactly all-zero.
      const auto syn = outcome.syndrome_counts();
      REQUIRE(syn.counts.size() == 1);
      CHECK(syn.counts.begin()->first == "000000");
    }
  }
}

TEST_CASE("completeness holds for many random passwords") {
  for (uint64_t i = 0; i < 25; ++i) {
    const auto keys = keys_for(100 + i);
    for (auto mode :
         {VerificationMode::PhaseOnly, VerificationMode::BitAndPhase}) {
      const auto outcome = run_pipeline(keys, keys, mode, 1000, i, nullptr);
      CHECK(outcome.pass_fraction == 1.0);
    }
  }
}

TEST_CASE("trivial postprocess accepts all-zero raw readouts") {
  KeySet zero{};
  zero.perm = trapauth::identity_perm();
  qcirc::CountsMap raw;
  raw.add("000000", 100);
  const auto outcome =
      verify::postprocess(raw, zero, qcirc::PauliFrame(14),
                          VerificationMode::PhaseOnly);
  CHECK(outcome.pass_fraction == 1.0);

  qcirc::CountsMap bad;
  bad.add("0000", 1);
  CHECK_THROWS_AS(verify::postprocess(bad, zero, qcirc::PauliFrame(14),
                                      VerificationMode::PhaseOnly),
                  std::invalid_argument);
}

TEST_CASE("every single z-key difference is caught with the column syndrome") {
  const auto program_keys = keys_for(7);
  for (int q = 0; q < trapauth::kProgramQubits; ++q) {
    KeySet attempt = program_keys;
    attempt.z_keys[q] ^= 1;
    const auto outcome = run_pipeline(program_keys, attempt,
                                      VerificationMode::PhaseOnly, 400,
                                      q + 1, nullptr);
    CHECK(outcome.pass_fraction == 0.0);

    // The residual Z sits on logical position q; its post-processed
    // syndrome must be the parity-check column of q within its block.
    steane::Word e{};
    e[q % 7] = 1;
    const auto column = steane::classical_syndrome(e);
    std::string expected(6, '0');
    const int base = q < 7 ? 0 : 3;
    for (int r = 0; r < 3; ++r) {
      expected[base + r] = column[r] ? '1' : '0';
    }
    const auto syn = outcome.syndrome_counts();
    REQUIRE(syn.counts.size() == 1);
    CHECK(syn.counts.begin()->first == expected);
  }
}

TEST_CASE("every single x-key difference is caught by the codeword check") {
  const auto program_keys = keys_for(8);
  for (int q = 0; q < trapauth::kProgramQubits; ++q) {
    KeySet attempt = program_keys;
    attempt.x_keys[q] ^= 1;
    const auto both = run_pipeline(program_keys, attempt,
                                   VerificationMode::BitAndPhase, 400, q + 1,
                                   nullptr);
    CHECK(both.pass_fraction == 0.0);
    // Phase-only extraction is blind to bit flips.
    const auto phase = run_pipeline(program_keys, attempt,
                                    VerificationMode::PhaseOnly, 400, q + 1,
                                    nullptr);
    CHECK(phase.pass_fraction == 1.0);
  }
}

TEST_CASE("uniform random syndromes pass at exactly 1/64") {
  KeySet zero{};
  zero.perm = trapauth::identity_perm();
  qcirc::CountsMap raw;
  for (int v = 0; v < 64; ++v) {
    std::string bits(6, '0');
    for (int i = 0; i < 6; ++i) {
      if (v & (1 << (5 - i))) bits[i] = '1';
    }
    raw.add(bits, 25);
  }
  const auto outcome = verify::postprocess(
      raw, zero, qcirc::PauliFrame(14), VerificationMode::PhaseOnly);
  CHECK(outcome.pass_fraction == doctest::Approx(1.0 / 64.0));
}

TEST_CASE("decision thresholds") {
  verify::VerificationOutcome outcome;
  outcome.shots = 5000;
  outcome.pass_fraction = 1.0;
  verify::AcceptPolicy policy;
  policy.tau = 0.9;
  CHECK(verify::decide(outcome, policy) == verify::Decision::Accept);
  outcome.pass_fraction = 0.0;
  CHECK(verify::decide(outcome, policy) == verify::Decision::Reject);
  outcome.pass_fraction = 1.0 / 64.0;
  policy.tau = 0.5;
  CHECK(verify::decide(outcome, policy) == verify::Decision::Reject);
  outcome.shots = 10;
  CHECK_THROWS_AS(verify::decide(outcome, policy), std::invalid_argument);
}

TEST_CASE("postprocess is linear in injected readout offsets") {
  const auto program_keys = keys_for(12);
  const auto prepared = trapauth::prepare_program(program_keys, true);
  const auto mode = VerificationMode::BitAndPhase;
  const auto circuit =
      verify::build_verification(prepared.program, program_keys, mode);
  const auto raw = qcirc::sample(circuit, 200, 5);
  const int width = verify::readout_width(mode);

  for (int bit = 0; bit < width; ++bit) {
    // Flip readout bit `bit` in every raw sample.
    qcirc::CountsMap shifted;
    for (const auto& [bits, n] : raw.counts) {
      std::string s = bits;
      s[bit] = s[bit] == '0' ? '1' : '0';
      shifted.add(s, n);
    }

    // The matching frame-side injection: an X on a data wire reproduces a
    // data-bit flip; a Z on the block qubit whose parity column is the
    // indicator of row r reproduces a single syndrome-bit flip.
    qcirc::PauliFrame injected = prepared.frame;
    if (bit < trapauth::kProgramQubits) {
      injected.x[bit] ^= 1;
    } else {
      const int row = (bit - trapauth::kProgramQubits) % 3;
      const int block = (bit - trapauth::kProgramQubits) / 3;
      static constexpr int kColumnQubit[3] = {3, 1, 0};  // columns 100,010,001
      const int logical = 7 * block + kColumnQubit[row];
      injected.z[program_keys.perm[logical]] ^= 1;
    }

    const auto a =
        verify::postprocess(shifted, program_keys, prepared.frame, mode);
    const auto b = verify::postprocess(raw, program_keys, injected, mode);
    CHECK(a.pass_fraction == b.pass_fraction);
    CHECK(a.post_counts.counts == b.post_counts.counts);
  }
}

TEST_CASE("sampled pass rate matches the exact Born probability") {
  const auto program_keys = keys_for(21);
  const auto prepared = trapauth::prepare_program(program_keys, true);

  // A transposed permutation puts some extracted operators outside the
  // stabilizer group, so the pass rate lands strictly between 0 and 1.
  KeySet attempt = program_keys;
  std::swap(attempt.perm[2], attempt.perm[5]);

  for (auto mode :
       {VerificationMode::PhaseOnly, VerificationMode::BitAndPhase}) {
    const double exact = testutil::exact_pass_probability(
        prepared.program, attempt, prepared.frame, mode);
    const uint64_t shots = 20000;
    const auto outcome =
        run_pipeline(program_keys, attempt, mode, shots, 33, nullptr);
    const double sigma =
        std::sqrt(std::max(exact * (1 - exact), 1e-6) / shots);
    CHECK(std::abs(outcome.pass_fraction - exact) < 5 * sigma + 1e-9);
    CHECK(exact > 0.0);
    CHECK(exact < 1.0);
  }
}

TEST_CASE("all-zero syndrome frequency decreases with depolarizing strength") {
  const auto keys = keys_for(30);
  double previous = 1.1;
  for (const double p : {0.0, 0.001, 0.005, 0.02, 0.1}) {
    auto noise = qcirc::NoiseModel::uniform("sweep", verify::kTotalQubits, p,
                                            p, 0.0);
    const auto outcome = run_pipeline(keys, keys,
                                      VerificationMode::PhaseOnly, 5000, 101,
                                      &noise);
    const auto syn = outcome.syndrome_counts();
    double zero_fraction = 0.0;
    if (auto it = syn.counts.find("000000"); it != syn.counts.end()) {
      zero_fraction = static_cast<double>(it->second) / syn.shots;
    }
    CHECK(zero_fraction <= previous);
    previous = zero_fraction;
  }
  CHECK(previous < 0.1);  // heavy noise randomizes the register
}

TEST_CASE("naive pipeline verifies correct keys and is strictly deeper") {
  for (uint64_t i = 0; i < 25; ++i) {
    const auto keys = keys_for(300 + i);
    const auto naive =
        verify::build_naive_pipeline(keys, VerificationMode::PhaseOnly);
    const auto counts = qcirc::sample(naive, 300, i);
    REQUIRE(counts.counts.size() == 1);
    CHECK(counts.counts.begin()->first == "000000");

    const auto prepared = trapauth::prepare_program(keys, true);
    const auto delegated = verify::build_verification(
        prepared.program, keys, VerificationMode::PhaseOnly);
    CHECK(qcirc::depth(delegated) < qcirc::depth(naive));
  }
}

TEST_CASE("outcome json carries histograms and rates") {
  const auto keys = keys_for(2);
  const auto outcome = run_pipeline(keys, keys, VerificationMode::PhaseOnly,
                                    500, 3, nullptr);
  const auto j = outcome.to_json();
  CHECK(j.at("pass_fraction").get<double>() == 1.0);
  CHECK(j.at("syndrome_counts").at("counts").contains("000000"));
}
