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
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qpauth/qcirc.hpp"

namespace qpauth::mitigation {

enum class Method { Tensored, Complete };

inline constexpr int kMaxCompleteQubits = 6;

/// Estimated readout confusion, either one 2x2 block per qubit (tensored)
/// or the full 2^k x 2^k matrix (complete, k <= 6). Entries are
/// [prepared][read] = P(read | prepared).
struct CalibrationMatrix {
  Method method = Method::Tensored;
  std::vector<int> qubits;
  uint64_t shots_per_state = 0;
  std::vector<qcirc::Confusion> single;
  std::vector<std::vector<double>> full;

  int width() const { return static_cast<int>(qubits.size()); }
  nlohmann::json to_json() const;
  static CalibrationMatrix from_json(const nlohmann::json& j);
};

/// Prepares each required basis state (two states for tensored, 2^k for
/// complete), samples it under the model's readout noise only, and
/// estimates the confusion probabilities.
CalibrationMatrix calibrate(const qcirc::NoiseModel& noise,
                            const std::vector<int>& qubits, uint64_t shots,
                            Method method, uint64_t seed);

/// Inverts the calibrated forward model on the observed frequencies and
/// projects back to a probability distribution. The default inverts exactly
/// and then clips negatives and renormalizes; `constrained` instead runs a
/// nonnegative least-squares fit on the simplex. Throws on a singular
/// calibration, reporting the condition estimate.
std::map<std::string, double> mitigate(const qcirc::CountsMap& raw,
                                       const CalibrationMatrix& cal,
                                       bool constrained = false);

double total_variation(const std::map<std::string, double>& a,
                       const std::map<std::string, double>& b);

}  // namespace qpauth::mitigation
