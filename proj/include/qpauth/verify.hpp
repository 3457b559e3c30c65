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

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qpauth/qcirc.hpp"
#include "qpauth/steane.hpp"
#include "qpauth/trapauth.hpp"

namespace qpauth::verify {

inline constexpr int kAncillaQubits = 6;
inline constexpr int kTotalQubits = trapauth::kProgramQubits + kAncillaQubits;

enum class VerificationMode { PhaseOnly, BitAndPhase };

const char* mode_name(VerificationMode m);
VerificationMode mode_from_name(const std::string& name);

/// Per-shot readout width: 6 syndrome bits, plus the 14 data bits when bit
/// flips are checked as well.
int readout_width(VerificationMode m);

struct AcceptPolicy {
  double tau = 0.5;
  uint64_t min_shots = 100;

  nlohmann::json to_json() const;
  static AcceptPolicy from_json(const nlohmann::json& j);
};

struct VerificationOutcome {
  VerificationMode mode = VerificationMode::PhaseOnly;
  uint64_t shots = 0;
  uint64_t passed = 0;
  double pass_fraction = 0.0;
  /// Histogram over post-processed readouts. PhaseOnly keys are the six
  /// syndrome bits (block 1 rows then block 2 rows); BitAndPhase keys are
  /// the 14 un-permuted data bits followed by the six syndrome bits.
  qcirc::CountsMap post_counts;

  /// Marginal histogram of the six syndrome bits.
  qcirc::CountsMap syndrome_counts() const;
  nlohmann::json to_json() const;
};

/// Syndrome-extraction gates appended after the password program: one
/// ancilla per parity-check row and block, prepared with H, coupled by
/// CNOTs onto the data wires that the attempt's permutation designates for
/// that row's support, and closed with H before readout. The attempt's
/// inverse permutation is realized purely by this operand relabeling; the
/// one-time-pad decryption is deferred to postprocess().
qcirc::Circuit verification_extension(const trapauth::Perm& attempt_perm);

/// Program circuit plus extension plus terminal measurement. Throws if the
/// program does not span exactly 14 qubits.
qcirc::Circuit build_verification(const trapauth::PasswordProgram& program,
                                  const trapauth::KeySet& attempt_keys,
                                  VerificationMode mode);

/// Classical decryption and the accept test, per shot:
///  - XORs out the predicted readout offsets, i.e. the program's delegated
///    pad and the attempt's pad, both commuted through the verification
///    circuit to the measurement end;
///  - un-permutes data bits with the attempt's permutation;
///  - checks that both phase syndromes are zero, and in BitAndPhase mode
///    that block 1 reads an even-subcode word and block 2 any codeword.
VerificationOutcome postprocess(const qcirc::CountsMap& raw,
                                const trapauth::KeySet& attempt_keys,
                                const qcirc::PauliFrame& program_frame,
                                VerificationMode mode);

/// The fully-quantum counterpart kept for the depth comparison: the program
/// realizes the permutation with a SWAP network and the pad with gates on
/// the encoded state, and the verifier decrypts in-circuit (inverse pad,
/// inverse SWAP network) before canonical extraction.
qcirc::Circuit build_naive_pipeline(const trapauth::KeySet& keys,
                                    VerificationMode mode);

enum class Decision { Accept, Reject };

/// Accept iff pass_fraction >= policy.tau. Throws if the outcome has fewer
/// than policy.min_shots shots.
Decision decide(const VerificationOutcome& outcome, const AcceptPolicy& policy);

}  // namespace qpauth::verify
