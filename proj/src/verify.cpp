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

#include "qpauth/verify.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qpauth::verify {

const char* mode_name(VerificationMode m) {
  return m == VerificationMode::PhaseOnly ? "phase" : "bitphase";
}

VerificationMode mode_from_name(const std::string& name) {
  if (name == "phase") return VerificationMode::PhaseOnly;
  if (name == "bitphase") return VerificationMode::BitAndPhase;
  throw std::invalid_argument("unknown verification mode: " + name);
}

int readout_width(VerificationMode m) {
  return m == VerificationMode::PhaseOnly ? kAncillaQubits : kTotalQubits;
}

nlohmann::json AcceptPolicy::to_json() const {
  return nlohmann::json{{"tau", tau}, {"min_shots", min_shots}};
}

AcceptPolicy AcceptPolicy::from_json(const nlohmann::json& j) {
  AcceptPolicy p;
  p.tau = j.at("tau").get<double>();
  p.min_shots = j.at("min_shots").get<uint64_t>();
  if (p.tau <= 0.0 || p.tau > 1.0) {
    throw std::invalid_argument("tau must be in (0,1]");
  }
  return p;
}

qcirc::CountsMap VerificationOutcome::syndrome_counts() const {
  qcirc::CountsMap syn;
  for (const auto& [bits, n] : post_counts.counts) {
    syn.add(bits.substr(bits.size() - kAncillaQubits), n);
  }
  return syn;
}

nlohmann::json VerificationOutcome::to_json() const {
  nlohmann::json j;
  j["mode"] = mode_name(mode);
  j["shots"] = shots;
  j["passed"] = passed;
  j["pass_fraction"] = pass_fraction;
  j["syndrome_counts"] = syndrome_counts().to_json();
  j["post_counts"] = post_counts.to_json();
  return j;
}

qcirc::Circuit verification_extension(const trapauth::Perm& attempt_perm) {
  qcirc::Circuit ext(kTotalQubits);
  for (int block = 0; block < 2; ++block) {
    for (int row = 0; row < steane::kSyndromeBits; ++row) {
      const int ancilla = trapauth::kProgramQubits + 3 * block + row;
      ext.push(qcirc::Gate::h(ancilla));
      for (int j = 0; j < steane::kBlockLen; ++j) {
        if (steane::kParityCheck[row][j]) {
          const int logical = 7 * block + j;
          ext.push(qcirc::Gate::cnot(ancilla, attempt_perm[logical]));
        }
      }
      ext.push(qcirc::Gate::h(ancilla));
    }
  }
  return ext;
}

qcirc::Circuit build_verification(const trapauth::PasswordProgram& program,
                                  const trapauth::KeySet& attempt_keys,
                                  VerificationMode mode) {
  if (program.circuit.num_qubits != trapauth::kProgramQubits) {
    throw std::invalid_argument("password program must span 14 qubits");
  }
  qcirc::Circuit c(kTotalQubits);
  for (const auto& g : program.circuit.gates) c.push(g);
  for (const auto& g : verification_extension(attempt_keys.perm).gates) {
    c.push(g);
  }
  if (mode == VerificationMode::BitAndPhase) {
    for (int q = 0; q < trapauth::kProgramQubits; ++q) c.measure(q);
  }
  for (int a = trapauth::kProgramQubits; a < kTotalQubits; ++a) c.measure(a);
  return c;
}

namespace {

// Readout flips predicted for the residual pad (program pad minus the
// attempt's belief of it) once commuted through the extraction circuit.
std::vector<uint8_t> predicted_offsets(const trapauth::KeySet& attempt_keys,
                                       const qcirc::PauliFrame& program_frame,
                                       VerificationMode mode) {
  qcirc::PauliFrame residual =
      trapauth::prepare_program(attempt_keys, /*delegated=*/true).frame;
  residual ^= program_frame;

  qcirc::PauliFrame wide(kTotalQubits);
  for (int q = 0; q < trapauth::kProgramQubits; ++q) {
    wide.x[q] = residual.x[q];
    wide.z[q] = residual.z[q];
  }
  const qcirc::PauliFrame terminal = qcirc::propagate_through(
      verification_extension(attempt_keys.perm), wide);

  std::vector<uint8_t> offsets;
  if (mode == VerificationMode::BitAndPhase) {
    for (int q = 0; q < trapauth::kProgramQubits; ++q) {
      offsets.push_back(terminal.x[q]);
    }
  }
  for (int a = trapauth::kProgramQubits; a < kTotalQubits; ++a) {
    offsets.push_back(terminal.x[a]);
  }
  return offsets;
}

}  // namespace

VerificationOutcome postprocess(const qcirc::CountsMap& raw,
                                const trapauth::KeySet& attempt_keys,
                                const qcirc::PauliFrame& program_frame,
                                VerificationMode mode) {
  if (program_frame.num_qubits() != trapauth::kProgramQubits) {
    throw std::invalid_argument("program frame must span 14 qubits");
  }
  const std::size_t width = static_cast<std::size_t>(readout_width(mode));
  const std::vector<uint8_t> offsets =
      predicted_offsets(attempt_keys, program_frame, mode);

  VerificationOutcome out;
  out.mode = mode;
  for (const auto& [bits, n] : raw.counts) {
    if (bits.size() != width) {
      throw std::invalid_argument("raw readout width does not match mode");
    }
    std::string s = bits;
    for (std::size_t i = 0; i < width; ++i) {
      if (offsets[i]) s[i] = s[i] == '0' ? '1' : '0';
    }

    bool pass = true;
    const std::size_t syndrome_at = width - kAncillaQubits;
    for (std::size_t i = syndrome_at; i < width; ++i) {
      if (s[i] != '0') pass = false;
    }

    std::string post;
    if (mode == VerificationMode::BitAndPhase) {
      // Un-permute: logical position q was measured on wire perm[q].
      std::string logical(trapauth::kProgramQubits, '0');
      for (int q = 0; q < trapauth::kProgramQubits; ++q) {
        logical[q] = s[attempt_keys.perm[q]];
      }
      steane::Word block1{}, block2{};
      for (int j = 0; j < steane::kBlockLen; ++j) {
        block1[j] = logical[j] == '1';
        block2[j] = logical[7 + j] == '1';
      }
      if (!steane::is_even_codeword(block1)) pass = false;
      if (!steane::is_codeword(block2)) pass = false;
      post = logical + s.substr(syndrome_at);
    } else {
      post = s;
    }

    out.post_counts.add(post, n);
    out.shots += n;
    if (pass) out.passed += n;
  }
  out.pass_fraction =
      out.shots ? static_cast<double>(out.passed) / out.shots : 0.0;
  return out;
}

qcirc::Circuit build_naive_pipeline(const trapauth::KeySet& keys,
                                    VerificationMode mode) {
  qcirc::Circuit c(kTotalQubits);
  for (const auto& g : trapauth::trap_encoding_circuit().gates) c.push(g);
  for (const auto& g :
       trapauth::swap_network(keys.perm, trapauth::kProgramQubits).gates) {
    c.push(g);
  }
  auto pad = [&] {
    for (int q = 0; q < trapauth::kProgramQubits; ++q) {
      if (keys.x_keys[q]) c.push(qcirc::Gate::x(keys.perm[q]));
      if (keys.z_keys[q]) c.push(qcirc::Gate::z(keys.perm[q]));
    }
  };
  pad();  // encrypt
  pad();  // verifier decrypts
  const trapauth::Perm inverse = trapauth::inverse_perm(keys.perm);
  for (const auto& g :
       trapauth::swap_network(inverse, trapauth::kProgramQubits).gates) {
    c.push(g);
  }
  for (const auto& g :
       verification_extension(trapauth::identity_perm()).gates) {
    c.push(g);
  }
  if (mode == VerificationMode::BitAndPhase) {
    for (int q = 0; q < trapauth::kProgramQubits; ++q) c.measure(q);
  }
  for (int a = trapauth::kProgramQubits; a < kTotalQubits; ++a) c.measure(a);
  return c;
}

Decision decide(const VerificationOutcome& outcome,
                const AcceptPolicy& policy) {
  if (policy.tau <= 0.0 || policy.tau > 1.0) {
    throw std::invalid_argument("tau must be in (0,1]");
  }
  if (outcome.shots < policy.min_shots) {
    throw std::invalid_argument("not enough shots for a decision");
  }
  return outcome.pass_fraction >= policy.tau ? Decision::Accept
                                             : Decision::Reject;
}

}  // namespace qpauth::verify
