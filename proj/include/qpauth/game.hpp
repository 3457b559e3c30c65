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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qpauth/qcirc.hpp"
#include "qpauth/rng.hpp"
#include "qpauth/trapauth.hpp"
#include "qpauth/verify.hpp"

namespace qpauth::game {

/// Challenge sampler: the point itself with probability exactly 1/2,
/// otherwise a uniform n-bit string drawn from the complement of the point.
struct ChallengeDistribution {
  std::vector<uint8_t> point;  // one byte per bit
};

std::vector<uint8_t> sample_challenge(const ChallengeDistribution& dist,
                                      Rng& rng);

enum class Injection { None, PermError, XError, ZError, XZError,
                       FromDistribution };

/// 1: correct challenge. 2: transposed permutation. 3/4/5: X / Z / both
/// injected into the program circuit. 6: challenge drawn from the
/// distribution.
Injection injection_for_test(int id);

struct TestSpec {
  int id = 1;
  Injection injection = Injection::None;
  std::optional<int> target_qubit;  // data wire for injected errors
  int trials = 10;
  uint64_t shots = 5000;
  std::string noise = "ideal";
  verify::VerificationMode mode = verify::VerificationMode::PhaseOnly;

  static TestSpec standard(int id);
  /// Throws unless id and injection agree.
  void validate() const;
};

struct TrialResult {
  int trial = 0;
  bool attempt_is_point = false;
  double pass_fraction = 0.0;
};

struct RateRecord {
  int test = 0;
  std::optional<double> true_positive;   // mean over challenge == point
  std::optional<double> false_positive;  // mean over challenge != point
  int tp_trials = 0;
  int fp_trials = 0;
  int trials = 0;
  uint64_t shots = 0;
  std::string noise;
  std::string mode;
  std::vector<TrialResult> per_trial;

  nlohmann::json to_json() const;
};

struct TestHistograms {
  qcirc::CountsMap raw;
  qcirc::CountsMap post;
};

struct RateTable {
  std::vector<RateRecord> rows;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

struct SuiteResult {
  RateTable table;
  std::map<int, TestHistograms> histograms;  // first trial of each test
};

/// Runs one correctness test: `trials` independent program/verification
/// pipelines against the enrolled point, with per-trial seeds derived from
/// the master seed so parallel and serial execution agree bit-for-bit.
RateRecord run_test(const TestSpec& spec, const trapauth::Password& password,
                    uint64_t seed, TestHistograms* histograms = nullptr);

SuiteResult run_suite(const std::vector<TestSpec>& specs,
                      const trapauth::Password& password, uint64_t seed);

/// The six standard tests with shared trial/shot/noise/mode settings.
std::vector<TestSpec> standard_suite(int trials, uint64_t shots,
                                     const std::string& noise,
                                     verify::VerificationMode mode);

}  // namespace qpauth::game
