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
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qpauth/rng.hpp"

namespace qpauth::qcirc {

// Bit-ordering convention used everywhere in this project: qubit 0 is the
// leftmost character of a bitstring, and occupies the most significant bit
// of a basis-state index. bit(index, q) == (index >> (num_qubits-1-q)) & 1.

inline constexpr int kMaxQubits = 24;

enum class GateKind : uint8_t { X, Y, Z, H, S, CNOT, SWAP };

const char* gate_name(GateKind k);

struct Gate {
  GateKind kind;
  uint8_t q0 = 0;  // control for CNOT, first qubit for SWAP
  uint8_t q1 = 0;  // target for CNOT, second qubit for SWAP

  bool two_qubit() const {
    return kind == GateKind::CNOT || kind == GateKind::SWAP;
  }

  static Gate x(int q) { return {GateKind::X, static_cast<uint8_t>(q), 0}; }
  static Gate y(int q) { return {GateKind::Y, static_cast<uint8_t>(q), 0}; }
  static Gate z(int q) { return {GateKind::Z, static_cast<uint8_t>(q), 0}; }
  static Gate h(int q) { return {GateKind::H, static_cast<uint8_t>(q), 0}; }
  static Gate s(int q) { return {GateKind::S, static_cast<uint8_t>(q), 0}; }
  static Gate cnot(int control, int target) {
    return {GateKind::CNOT, static_cast<uint8_t>(control),
            static_cast<uint8_t>(target)};
  }
  static Gate swap(int a, int b) {
    return {GateKind::SWAP, static_cast<uint8_t>(a), static_cast<uint8_t>(b)};
  }

  bool operator==(const Gate&) const = default;
};

/// A gate program over at most kMaxQubits qubits. All measurements are
/// terminal; `measured` lists the qubits read out, in readout order (an
/// empty list means "measure every qubit in index order").
struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;
  std::vector<int> measured;

  Circuit() = default;
  explicit Circuit(int nq);

  /// Validates operand indices before appending; throws std::invalid_argument
  /// on out-of-range or repeated operands.
  void push(const Gate& g);

  void measure(int q);
  void measure_all();
  std::vector<int> readout_qubits() const;  // resolves the empty-list default
};

/// Length of the longest chain of gates that share a qubit.
int depth(const Circuit& c);

enum class Exec { Serial, Parallel };

struct StateVector {
  int num_qubits = 0;
  std::vector<std::complex<double>> amps;

  static StateVector zero(int num_qubits);
  std::size_t size() const { return amps.size(); }
};

double norm(const StateVector& s);

void apply_gate(StateVector& state, const Gate& g, Exec exec = Exec::Parallel);

/// Applies `c.gates` in order starting from |0...0>.
StateVector run_ideal(const Circuit& c, Exec exec = Exec::Parallel);

/// Per-qubit readout confusion row-stochastic matrix:
/// m[true_bit][read_bit] = P(read | true).
using Confusion = std::array<std::array<double, 2>, 2>;

struct NoiseModel {
  std::string name = "ideal";
  double p1 = 0.0;  // depolarizing probability per single-qubit gate
  double p2 = 0.0;  // depolarizing probability per two-qubit gate
  std::vector<Confusion> readout;  // one entry per qubit

  bool has_gate_noise() const { return p1 > 0.0 || p2 > 0.0; }
  bool has_readout_noise() const;

  /// Throws std::invalid_argument if probabilities are out of range or a
  /// confusion row does not sum to 1 within 1e-12.
  void validate(int num_qubits) const;

  static NoiseModel ideal(int num_qubits);
  static NoiseModel uniform(std::string name, int num_qubits, double p1,
                            double p2, double readout_flip);
  /// Presets: "ideal", "mock-device", "device-like".
  static NoiseModel preset(const std::string& name, int num_qubits);
  static std::vector<std::string> preset_names();
};

struct CountsMap {
  uint64_t shots = 0;
  std::map<std::string, uint64_t> counts;

  void add(const std::string& bits, uint64_t n = 1);
  nlohmann::json to_json() const;
  static CountsMap from_json(const nlohmann::json& j);
  /// Two columns: bitstring, frequency (count/shots).
  std::string to_csv() const;
};

/// Measures `shots` samples of the circuit. Noise is realized as stochastic
/// Pauli insertion after each gate (uniform over the non-identity Paulis on
/// that gate's operands, with probability p1/p2) plus independent per-qubit
/// readout confusion. Deterministic for a fixed (circuit, shots, noise, seed)
/// regardless of thread count: shot i uses derive_seed(seed, i).
///
/// All gates in the set are Clifford, so inserted Paulis are propagated
/// classically to the terminal frame and applied as bit flips on samples
/// drawn from the ideal output distribution. This is distribution-exact and
/// avoids re-simulating the statevector per shot.
CountsMap sample(const Circuit& c, uint64_t shots,
                 const std::optional<NoiseModel>& noise, uint64_t seed,
                 Exec exec = Exec::Parallel);
CountsMap sample(const Circuit& c, uint64_t shots, uint64_t seed);

/// Serial reference sampler: re-simulates the full statevector for every
/// shot, applying the sampled Pauli insertions as explicit gates. Kept for
/// testing and benchmarking against the frame-based path above; the two are
/// distribution-equivalent but consume randomness differently.
CountsMap sample_reference(const Circuit& c, uint64_t shots,
                           const std::optional<NoiseModel>& noise,
                           uint64_t seed);

/// Exact output distribution over readout bitstrings for a noiseless run.
std::map<std::string, double> ideal_distribution(const Circuit& c,
                                                 Exec exec = Exec::Parallel);

/// X/Z bit pair per qubit identifying a Pauli operator up to phase.
struct PauliFrame {
  std::vector<uint8_t> x;
  std::vector<uint8_t> z;

  PauliFrame() = default;
  explicit PauliFrame(int num_qubits)
      : x(num_qubits, 0), z(num_qubits, 0) {}
  int num_qubits() const { return static_cast<int>(x.size()); }
  bool identity() const;
  PauliFrame& operator^=(const PauliFrame& other);
  bool operator==(const PauliFrame&) const = default;
};

/// Conjugates the frame forward through one gate: P -> U P U^dagger with
/// phases discarded. H swaps X<->Z, S maps X to Y (tracked as z ^= x), CNOT
/// propagates control-X onto the target and target-Z onto the control, SWAP
/// exchanges the per-qubit entries, and Pauli gates leave the frame as-is.
void propagate(PauliFrame& frame, const Gate& g);

/// Frame after commuting `frame` through every gate of `c` in order.
PauliFrame propagate_through(const Circuit& c, PauliFrame frame);

std::string bits_of_index(uint64_t index, int num_qubits,
                          const std::vector<int>& qubits);

}  // namespace qpauth::qcirc
