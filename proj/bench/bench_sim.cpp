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
//
// Throughput comparison between the serial and OpenMP statevector kernels
// and between the trajectory reference sampler and the Pauli-frame sampler
// on the standard verification pipeline.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "qpauth/qcirc.hpp"
#include "qpauth/trapauth.hpp"
#include "qpauth/verify.hpp"

using namespace qpauth;

namespace {

qcirc::Circuit pipeline() {
  trapauth::Salt salt{};
  salt.fill(7);
  const auto keys =
      trapauth::derive_keys(trapauth::Password{"benchmark"}, salt);
  const auto prepared = trapauth::prepare_program(keys, true);
  return verify::build_verification(prepared.program, keys,
                                    verify::VerificationMode::PhaseOnly);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main() {
  const qcirc::Circuit circuit = pipeline();
  const double amp_count =
      static_cast<double>(circuit.gates.size()) * (1u << circuit.num_qubits);
  std::printf("pipeline: %d qubits, %zu gates, depth %d, %d threads\n",
              circuit.num_qubits, circuit.gates.size(), qcirc::depth(circuit),
              omp_get_max_threads());

  for (int round = 0; round < 2; ++round) {
    auto t0 = std::chrono::steady_clock::now();
    auto serial = qcirc::run_ideal(circuit, qcirc::Exec::Serial);
    const double ts = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = qcirc::run_ideal(circuit, qcirc::Exec::Parallel);
    const double tp = seconds_since(t0);

    double max_dev = 0.0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
      max_dev = std::max(max_dev, std::abs(serial.amps[i] - parallel.amps[i]));
    }
    std::printf(
        "statevector run %d: serial %.3fs (%.1f Mamp/s)  "
        "openmp %.3fs (%.1f Mamp/s)  speedup %.2fx  max|diff| %.1e\n",
        round, ts, amp_count / ts / 1e6, tp, amp_count / tp / 1e6, ts / tp,
        max_dev);
  }

  const auto noise =
      qcirc::NoiseModel::preset("mock-device", circuit.num_qubits);

  constexpr uint64_t kReferenceShots = 40;
  auto t0 = std::chrono::steady_clock::now();
  auto ref = qcirc::sample_reference(circuit, kReferenceShots, noise, 11);
  const double t_ref = seconds_since(t0);

  constexpr uint64_t kFrameShots = 200000;
  t0 = std::chrono::steady_clock::now();
  auto fast = qcirc::sample(circuit, kFrameShots, noise, 11);
  const double t_fast = seconds_since(t0);

  std::printf(
      "trajectory sampler: %.1f shots/s   frame sampler: %.0f shots/s   "
      "speedup %.0fx\n",
      kReferenceShots / t_ref, kFrameShots / t_fast,
      (kFrameShots / t_fast) / (kReferenceShots / t_ref));
  std::printf("reference shots %llu, frame shots %llu\n",
              static_cast<unsigned long long>(ref.shots),
              static_cast<unsigned long long>(fast.shots));
  return 0;
}
