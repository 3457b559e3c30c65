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

#include "qpauth/qcirc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include <nlohmann/json.hpp>

namespace qpauth::qcirc {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

// Loops below this size are not worth a thread team.
constexpr std::size_t kParallelThreshold = 1 << 12;

uint64_t qubit_mask(int num_qubits, int q) {
  return 1ull << (num_qubits - 1 - q);
}

}  // namespace

const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::CNOT: return "CNOT";
    case GateKind::SWAP: return "SWAP";
  }
  return "?";
}

Circuit::Circuit(int nq) : num_qubits(nq) {
  if (nq < 1 || nq > kMaxQubits) {
    throw std::invalid_argument("circuit qubit count out of range: " +
                                std::to_string(nq));
  }
}

void Circuit::push(const Gate& g) {
  auto check = [&](int q) {
    if (q < 0 || q >= num_qubits) {
      throw std::invalid_argument(std::string(gate_name(g.kind)) +
                                  " operand out of range: " +
                                  std::to_string(q));
    }
  };
  check(g.q0);
  if (g.two_qubit()) {
    check(g.q1);
    if (g.q0 == g.q1) {
      throw std::invalid_argument(std::string(gate_name(g.kind)) +
                                  " operands must be distinct");
    }
  }
  gates.push_back(g);
}

void Circuit::measure(int q) {
  if (q < 0 || q >= num_qubits) {
    throw std::invalid_argument("measured qubit out of range");
  }
  if (std::find(measured.begin(), measured.end(), q) != measured.end()) {
    throw std::invalid_argument("qubit measured twice: " + std::to_string(q));
  }
  measured.push_back(q);
}

void Circuit::measure_all() {
  measured.clear();
  for (int q = 0; q < num_qubits; ++q) measured.push_back(q);
}

std::vector<int> Circuit::readout_qubits() const {
  if (!measured.empty()) return measured;
  std::vector<int> all(num_qubits);
  std::iota(all.begin(), all.end(), 0);
  return all;
}

int depth(const Circuit& c) {
  std::vector<int> level(c.num_qubits, 0);
  int result = 0;
  for (const Gate& g : c.gates) {
    int d = level[g.q0];
    if (g.two_qubit()) d = std::max(d, level[g.q1]);
    ++d;
    level[g.q0] = d;
    if (g.two_qubit()) level[g.q1] = d;
    result = std::max(result, d);
  }
  return result;
}

StateVector StateVector::zero(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("statevector qubit count out of range");
  }
  StateVector s;
  s.num_qubits = num_qubits;
  s.amps.assign(1ull << num_qubits, {0.0, 0.0});
  s.amps[0] = {1.0, 0.0};
  return s;
}

double norm(const StateVector& s) {
  double acc = 0.0;
  for (const auto& a : s.amps) acc += std::norm(a);
  return std::sqrt(acc);
}

void apply_gate(StateVector& state, const Gate& g, Exec exec) {
  const int n = state.num_qubits;
  if (g.q0 >= n || (g.two_qubit() && g.q1 >= n)) {
    throw std::out_of_range("gate operand exceeds statevector width");
  }
  auto* a = state.amps.data();
  const bool par = exec == Exec::Parallel && state.size() >= kParallelThreshold;

  if (!g.two_qubit()) {
    const uint64_t m = qubit_mask(n, g.q0);
    const int64_t half = static_cast<int64_t>(state.size() >> 1);
    const uint64_t low = m - 1;
    const uint64_t high = ~low;
    switch (g.kind) {
      case GateKind::X: {
#pragma omp parallel for if (par)
        for (int64_t k = 0; k < half; ++k) {
          const uint64_t i0 = ((k & high) << 1) | (k & low);
          std::swap(a[i0], a[i0 | m]);
        }
        break;
      }
      case GateKind::Y: {
#pragma omp parallel for if (par)
        for (int64_t k = 0; k < half; ++k) {
          const uint64_t i0 = ((k & high) << 1) | (k & low);
          const auto a0 = a[i0];
          const auto a1 = a[i0 | m];
          a[i0] = {a1.imag(), -a1.real()};   // -i * a1
          a[i0 | m] = {-a0.imag(), a0.real()};  // i * a0
        }
        break;
      }
      case GateKind::Z: {
#pragma omp parallel for if (par)
        for (int64_t k = 0; k < half; ++k) {
          const uint64_t i1 = (((k & high) << 1) | (k & low)) | m;
          a[i1] = -a[i1];
        }
        break;
      }
      case GateKind::S: {
#pragma omp parallel for if (par)
        for (int64_t k = 0; k < half; ++k) {
          const uint64_t i1 = (((k & high) << 1) | (k & low)) | m;
          a[i1] = {-a[i1].imag(), a[i1].real()};  // i * a1
        }
        break;
      }
      case GateKind::H: {
#pragma omp parallel for if (par)
        for (int64_t k = 0; k < half; ++k) {
          const uint64_t i0 = ((k & high) << 1) | (k & low);
          const auto a0 = a[i0];
          const auto a1 = a[i0 | m];
          a[i0] = kSqrtHalf * (a0 + a1);
          a[i0 | m] = kSqrtHalf * (a0 - a1);
        }
        break;
      }
      default:
        throw std::logic_error("unreachable");
    }
    return;
  }

  const uint64_t mc = qubit_mask(n, g.q0);
  const uint64_t mt = qubit_mask(n, g.q1);
  const int64_t quarter = static_cast<int64_t>(state.size() >> 2);
  // Expand a (n-2)-bit loop index into a basis index with zeros at both
  // operand bit positions.
  const uint64_t mlo = std::min(mc, mt);
  const uint64_t mhi = std::max(mc, mt);
  const uint64_t low = mlo - 1;
  const uint64_t mid = (mhi - 1) & ~(mlo | low);
  const uint64_t high = ~((mhi << 1) - 1);

  switch (g.kind) {
    case GateKind::CNOT: {
#pragma omp parallel for if (par)
      for (int64_t k = 0; k < quarter; ++k) {
        const uint64_t base =
            ((k << 2) & high) | ((k << 1) & mid) | (k & low);
        std::swap(a[base | mc], a[base | mc | mt]);
      }
      break;
    }
    case GateKind::SWAP: {
#pragma omp parallel for if (par)
      for (int64_t k = 0; k < quarter; ++k) {
        const uint64_t base =
            ((k << 2) & high) | ((k << 1) & mid) | (k & low);
        std::swap(a[base | mc], a[base | mt]);
      }
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
}

StateVector run_ideal(const Circuit& c, Exec exec) {
  StateVector s = StateVector::zero(c.num_qubits);
  for (const Gate& g : c.gates) apply_gate(s, g, exec);
  return s;
}

bool NoiseModel::has_readout_noise() const {
  for (const auto& m : readout) {
    if (m[0][1] != 0.0 || m[1][0] != 0.0) return true;
  }
  return false;
}

void NoiseModel::validate(int num_qubits) const {
  if (p1 < 0.0 || p1 > 1.0 || p2 < 0.0 || p2 > 1.0) {
    throw std::invalid_argument("depolarizing probability out of [0,1]");
  }
  if (!readout.empty() && static_cast<int>(readout.size()) < num_qubits) {
    throw std::invalid_argument("readout confusion shorter than register");
  }
  for (const auto& m : readout) {
    for (int t = 0; t < 2; ++t) {
      if (m[t][0] < 0.0 || m[t][1] < 0.0 ||
          std::abs(m[t][0] + m[t][1] - 1.0) > 1e-12) {
        throw std::invalid_argument("confusion row must sum to 1");
      }
    }
  }
}

NoiseModel NoiseModel::ideal(int num_qubits) {
  NoiseModel m;
  m.name = "ideal";
  m.readout.assign(num_qubits, Confusion{{{1.0, 0.0}, {0.0, 1.0}}});
  return m;
}

NoiseModel NoiseModel::uniform(std::string name, int num_qubits, double p1,
                               double p2, double readout_flip) {
  NoiseModel m;
  m.name = std::move(name);
  m.p1 = p1;
  m.p2 = p2;
  m.readout.assign(num_qubits,
                   Confusion{{{1.0 - readout_flip, readout_flip},
                              {readout_flip, 1.0 - readout_flip}}});
  m.validate(num_qubits);
  return m;
}

// The two noisy presets are calibration knobs chosen so that the standard
// password-verification pipeline lands in its documented operating bands:
// "mock-device" keeps the error-free readout around the ten-percent level,
// "device-like" randomizes the output to near uniform.
NoiseModel NoiseModel::preset(const std::string& name, int num_qubits) {
  if (name == "ideal") return ideal(num_qubits);
  if (name == "mock-device") {
    return uniform("mock-device", num_qubits, 0.007, 0.07, 0.05);
  }
  if (name == "device-like") {
    return uniform("device-like", num_qubits, 0.05, 0.30, 0.08);
  }
  throw std::invalid_argument("unknown noise preset: " + name);
}

std::vector<std::string> NoiseModel::preset_names() {
  return {"ideal", "mock-device", "device-like"};
}

void CountsMap::add(const std::string& bits, uint64_t n) {
  counts[bits] += n;
  shots += n;
}

nlohmann::json CountsMap::to_json() const {
  nlohmann::json j;
  j["shots"] = shots;
  j["counts"] = nlohmann::json::object();
  for (const auto& [bits, n] : counts) j["counts"][bits] = n;
  return j;
}

CountsMap CountsMap::from_json(const nlohmann::json& j) {
  CountsMap m;
  m.shots = j.at("shots").get<uint64_t>();
  for (const auto& [bits, n] : j.at("counts").items()) {
    m.counts[bits] = n.get<uint64_t>();
  }
  uint64_t total = 0;
  for (const auto& [bits, n] : m.counts) total += n;
  if (total != m.shots) {
    throw std::invalid_argument("counts do not sum to shots");
  }
  return m;
}

std::string CountsMap::to_csv() const {
  std::ostringstream out;
  out << "bitstring,frequency\n";
  for (const auto& [bits, n] : counts) {
    out << bits << "," << (static_cast<double>(n) / (shots ? shots : 1))
        << "\n";
  }
  return out.str();
}

std::string bits_of_index(uint64_t index, int num_qubits,
                          const std::vector<int>& qubits) {
  std::string s(qubits.size(), '0');
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (index & (1ull << (num_qubits - 1 - qubits[i]))) s[i] = '1';
  }
  return s;
}

bool PauliFrame::identity() const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] || z[i]) return false;
  }
  return true;
}

PauliFrame& PauliFrame::operator^=(const PauliFrame& other) {
  if (other.x.size() != x.size()) {
    throw std::invalid_argument("frame width mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] ^= other.x[i];
    z[i] ^= other.z[i];
  }
  return *this;
}

void propagate(PauliFrame& frame, const Gate& g) {
  switch (g.kind) {
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
      break;  // Pauli conjugation changes only phases
    case GateKind::H:
      std::swap(frame.x[g.q0], frame.z[g.q0]);
      break;
    case GateKind::S:
      frame.z[g.q0] ^= frame.x[g.q0];
      break;
    case GateKind::CNOT:
      frame.x[g.q1] ^= frame.x[g.q0];
      frame.z[g.q0] ^= frame.z[g.q1];
      break;
    case GateKind::SWAP:
      std::swap(frame.x[g.q0], frame.x[g.q1]);
      std::swap(frame.z[g.q0], frame.z[g.q1]);
      break;
  }
}

PauliFrame propagate_through(const Circuit& c, PauliFrame frame) {
  if (frame.num_qubits() != c.num_qubits) {
    throw std::invalid_argument("frame width does not match circuit");
  }
  for (const Gate& g : c.gates) propagate(frame, g);
  return frame;
}

namespace {

// Error draw shared by both samplers. Returns the sampled Pauli as (x, z)
// bit pairs on the gate operands; `kind` 0 means "no error". The draw order
// is part of the seeded contract: one uniform per noisy gate, then one more
// to pick the non-identity Pauli.
struct PauliError {
  bool triggered = false;
  uint8_t x0 = 0, z0 = 0, x1 = 0, z1 = 0;
};

PauliError draw_error(const Gate& g, const NoiseModel& noise, Rng& rng) {
  PauliError e;
  if (g.two_qubit()) {
    if (noise.p2 <= 0.0) return e;
    if (!rng.bernoulli(noise.p2)) return e;
    const uint32_t v = rng.below(15) + 1;  // 1..15 over (I,X,Y,Z)^2 \ {II}
    const uint32_t pa = v & 3, pb = v >> 2;
    e.triggered = true;
    e.x0 = pa == 1 || pa == 2;
    e.z0 = pa == 2 || pa == 3;
    e.x1 = pb == 1 || pb == 2;
    e.z1 = pb == 2 || pb == 3;
  } else {
    if (noise.p1 <= 0.0) return e;
    if (!rng.bernoulli(noise.p1)) return e;
    const uint32_t p = rng.below(3) + 1;  // 1=X, 2=Y, 3=Z
    e.triggered = true;
    e.x0 = p == 1 || p == 2;
    e.z0 = p == 2 || p == 3;
  }
  return e;
}

std::vector<double> cumulative_probabilities(const StateVector& s) {
  std::vector<double> cum(s.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc += std::norm(s.amps[i]);
    cum[i] = acc;
  }
  return cum;
}

uint64_t draw_index(const std::vector<double>& cum, double u) {
  const double target = u * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), target);
  if (it == cum.end()) --it;
  return static_cast<uint64_t>(it - cum.begin());
}

void apply_readout(std::string& bits, const std::vector<int>& readout,
                   const NoiseModel& noise, Rng& rng) {
  for (std::size_t i = 0; i < readout.size(); ++i) {
    const Confusion& m = noise.readout[readout[i]];
    const int truth = bits[i] == '1';
    if (rng.uniform() < m[truth][1 - truth]) bits[i] = truth ? '0' : '1';
  }
}

}  // namespace

CountsMap sample(const Circuit& c, uint64_t shots,
                 const std::optional<NoiseModel>& noise, uint64_t seed,
                 Exec exec) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (noise) noise->validate(c.num_qubits);

  const StateVector psi = run_ideal(c, exec);
  const std::vector<double> cum = cumulative_probabilities(psi);
  const std::vector<int> readout = c.readout_qubits();
  const bool gate_noise = noise && noise->has_gate_noise();
  const bool readout_noise = noise && noise->has_readout_noise();

  const int num_threads =
      exec == Exec::Parallel ? omp_get_max_threads() : 1;
  std::vector<std::map<std::string, uint64_t>> partial(num_threads);

#pragma omp parallel for schedule(static) num_threads(num_threads) \
    if (exec == Exec::Parallel)
  for (int64_t shot = 0; shot < static_cast<int64_t>(shots); ++shot) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(shot)));
    PauliFrame frame(c.num_qubits);
    if (gate_noise) {
      for (const Gate& g : c.gates) {
        propagate(frame, g);
        const PauliError e = draw_error(g, *noise, rng);
        if (e.triggered) {
          frame.x[g.q0] ^= e.x0;
          frame.z[g.q0] ^= e.z0;
          if (g.two_qubit()) {
            frame.x[g.q1] ^= e.x1;
            frame.z[g.q1] ^= e.z1;
          }
        }
      }
    }
    uint64_t index = draw_index(cum, rng.uniform());
    if (gate_noise) {
      // A terminal X part flips computational outcomes; the Z part only
      // changes phases and is invisible to the readout.
      for (int q = 0; q < c.num_qubits; ++q) {
        if (frame.x[q]) index ^= 1ull << (c.num_qubits - 1 - q);
      }
    }
    std::string bits = bits_of_index(index, c.num_qubits, readout);
    if (readout_noise) apply_readout(bits, readout, *noise, rng);
    ++partial[omp_get_thread_num()][bits];
  }

  CountsMap result;
  for (const auto& part : partial) {
    for (const auto& [bits, n] : part) result.add(bits, n);
  }
  return result;
}

CountsMap sample(const Circuit& c, uint64_t shots, uint64_t seed) {
  return sample(c, shots, std::nullopt, seed);
}

CountsMap sample_reference(const Circuit& c, uint64_t shots,
                           const std::optional<NoiseModel>& noise,
                           uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (noise) noise->validate(c.num_qubits);
  const std::vector<int> readout = c.readout_qubits();
  const bool gate_noise = noise && noise->has_gate_noise();
  const bool readout_noise = noise && noise->has_readout_noise();

  CountsMap result;
  StateVector clean;
  std::vector<double> clean_cum;
  if (!gate_noise) {
    clean = run_ideal(c, Exec::Serial);
    clean_cum = cumulative_probabilities(clean);
  }

  for (uint64_t shot = 0; shot < shots; ++shot) {
    Rng rng(derive_seed(seed, shot));
    uint64_t index;
    if (gate_noise) {
      StateVector s = StateVector::zero(c.num_qubits);
      for (const Gate& g : c.gates) {
        apply_gate(s, g, Exec::Serial);
        const PauliError e = draw_error(g, *noise, rng);
        if (e.triggered) {
          if (e.x0 && e.z0) apply_gate(s, Gate::y(g.q0), Exec::Serial);
          else if (e.x0) apply_gate(s, Gate::x(g.q0), Exec::Serial);
          else if (e.z0) apply_gate(s, Gate::z(g.q0), Exec::Serial);
          if (g.two_qubit()) {
            if (e.x1 && e.z1) apply_gate(s, Gate::y(g.q1), Exec::Serial);
            else if (e.x1) apply_gate(s, Gate::x(g.q1), Exec::Serial);
            else if (e.z1) apply_gate(s, Gate::z(g.q1), Exec::Serial);
          }
        }
      }
      index = draw_index(cumulative_probabilities(s), rng.uniform());
    } else {
      index = draw_index(clean_cum, rng.uniform());
    }
    std::string bits = bits_of_index(index, c.num_qubits, readout);
    if (readout_noise) apply_readout(bits, readout, *noise, rng);
    result.add(bits);
  }
  return result;
}

std::map<std::string, double> ideal_distribution(const Circuit& c, Exec exec) {
  const StateVector psi = run_ideal(c, exec);
  const std::vector<int> readout = c.readout_qubits();
  std::map<std::string, double> dist;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double p = std::norm(psi.amps[i]);
    if (p > 0.0) dist[bits_of_index(i, c.num_qubits, readout)] += p;
  }
  return dist;
}

}  // namespace qpauth::qcirc
