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

#include "qpauth/game.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qpauth/crypto.hpp"

namespace qpauth::game {

std::vector<uint8_t> sample_challenge(const ChallengeDistribution& dist,
                                      Rng& rng) {
  const std::size_t n = dist.point.size();
  if (n == 0) throw std::invalid_argument("challenge point is empty");
  if (rng.uniform() < 0.5) return dist.point;
  // Uniform over the complement by rejection; never emits the point.
  for (;;) {
    std::vector<uint8_t> x(n);
    for (auto& b : x) b = static_cast<uint8_t>(rng.below(2));
    if (x != dist.point) return x;
  }
}

Injection injection_for_test(int id) {
  switch (id) {
    case 1: return Injection::None;
    case 2: return Injection::PermError;
    case 3: return Injection::XError;
    case 4: return Injection::ZError;
    case 5: return Injection::XZError;
    case 6: return Injection::FromDistribution;
  }
  throw std::invalid_argument("test id must be 1..6");
}

TestSpec TestSpec::standard(int id) {
  TestSpec spec;
  spec.id = id;
  spec.injection = injection_for_test(id);
  return spec;
}

void TestSpec::validate() const {
  if (injection != injection_for_test(id)) {
    throw std::invalid_argument("test id and injection disagree");
  }
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (target_qubit &&
      (*target_qubit < 0 || *target_qubit >= trapauth::kProgramQubits)) {
    throw std::invalid_argument("target qubit out of range");
  }
}

namespace {

trapauth::Salt salt_from_seed(uint64_t seed) {
  trapauth::Salt salt{};
  crypto::Drbg drbg(derive_seed(seed, 0x5a17));
  drbg.fill(salt);
  return salt;
}

TrialResult run_trial(const TestSpec& spec,
                      const trapauth::KeySet& program_keys,
                      const std::vector<uint8_t>& point,
                      const qcirc::NoiseModel& noise, uint64_t trial_seed,
                      int trial_index, TestHistograms* histograms) {
  Rng rng(trial_seed);
  trapauth::KeySet attempt = program_keys;
  bool attempt_is_point = true;
  std::optional<qcirc::Gate> inject_x, inject_z;

  switch (spec.injection) {
    case Injection::None:
      break;
    case Injection::PermError: {
      const int i = static_cast<int>(rng.below(trapauth::kProgramQubits));
      int j = static_cast<int>(rng.below(trapauth::kProgramQubits - 1));
      if (j >= i) ++j;
      std::swap(attempt.perm[i], attempt.perm[j]);
      attempt_is_point = false;
      break;
    }
    case Injection::XError:
    case Injection::ZError:
    case Injection::XZError: {
      const int target = spec.target_qubit
                             ? *spec.target_qubit
                             : static_cast<int>(
                                   rng.below(trapauth::kProgramQubits));
      if (spec.injection != Injection::ZError) {
        inject_x = qcirc::Gate::x(target);
      }
      if (spec.injection != Injection::XError) {
        inject_z = qcirc::Gate::z(target);
      }
      attempt_is_point = false;
      break;
    }
    case Injection::FromDistribution: {
      const auto challenge = sample_challenge({point}, rng);
      attempt_is_point = challenge == point;
      attempt = trapauth::derive_keys_from_point(challenge,
                                                 program_keys.salt);
      break;
    }
  }

  auto prepared = trapauth::prepare_program(program_keys, /*delegated=*/true);
  if (inject_x) prepared.program.circuit.push(*inject_x);
  if (inject_z) prepared.program.circuit.push(*inject_z);

  const qcirc::Circuit circuit =
      verify::build_verification(prepared.program, attempt, spec.mode);
  const qcirc::CountsMap raw =
      qcirc::sample(circuit, spec.shots, noise, derive_seed(trial_seed, 1));
  const verify::VerificationOutcome outcome =
      verify::postprocess(raw, attempt, prepared.frame, spec.mode);

  if (histograms && trial_index == 0) {
    histograms->raw = raw;
    histograms->post = outcome.post_counts;
  }
  return TrialResult{trial_index, attempt_is_point, outcome.pass_fraction};
}

}  // namespace

RateRecord run_test(const TestSpec& spec, const trapauth::Password& password,
                    uint64_t seed, TestHistograms* histograms) {
  spec.validate();
  const auto point = trapauth::point_of(password);
  const trapauth::Salt salt = salt_from_seed(seed);
  const trapauth::KeySet program_keys =
      trapauth::derive_keys_from_point(point, salt);
  const qcirc::NoiseModel noise =
      qcirc::NoiseModel::preset(spec.noise, verify::kTotalQubits);

  std::vector<TrialResult> results(spec.trials);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < spec.trials; ++t) {
    results[t] = run_trial(spec, program_keys, point, noise,
                           derive_seed(seed, static_cast<uint64_t>(t)), t,
                           histograms);
  }

  RateRecord rec;
  rec.test = spec.id;
  rec.trials = spec.trials;
  rec.shots = spec.shots;
  rec.noise = spec.noise;
  rec.mode = verify::mode_name(spec.mode);
  rec.per_trial = results;
  double tp_sum = 0.0, fp_sum = 0.0;
  for (const auto& r : results) {
    if (r.attempt_is_point) {
      tp_sum += r.pass_fraction;
      ++rec.tp_trials;
    } else {
      fp_sum += r.pass_fraction;
      ++rec.fp_trials;
    }
  }
  if (rec.tp_trials > 0) rec.true_positive = tp_sum / rec.tp_trials;
  if (rec.fp_trials > 0) rec.false_positive = fp_sum / rec.fp_trials;
  return rec;
}

nlohmann::json RateRecord::to_json() const {
  nlohmann::json j;
  j["test"] = test;
  j["tp"] = true_positive ? nlohmann::json(*true_positive)
                          : nlohmann::json(nullptr);
  j["fp"] = false_positive ? nlohmann::json(*false_positive)
                           : nlohmann::json(nullptr);
  j["tp_trials"] = tp_trials;
  j["fp_trials"] = fp_trials;
  j["trials"] = trials;
  j["shots"] = shots;
  j["noise"] = noise;
  j["mode"] = mode;
  return j;
}

nlohmann::json RateTable::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) j.push_back(r.to_json());
  return j;
}

std::string RateTable::to_csv() const {
  std::ostringstream out;
  out << "test,tp,fp,tp_trials,fp_trials,trials,shots,noise,mode\n";
  for (const auto& r : rows) {
    out << r.test << ",";
    if (r.true_positive) out << *r.true_positive;
    out << ",";
    if (r.false_positive) out << *r.false_positive;
    out << "," << r.tp_trials << "," << r.fp_trials << "," << r.trials << ","
        << r.shots << "," << r.noise << "," << r.mode << "\n";
  }
  return out.str();
}

SuiteResult run_suite(const std::vector<TestSpec>& specs,
                      const trapauth::Password& password, uint64_t seed) {
  SuiteResult result;
  for (const auto& spec : specs) {
    TestHistograms hist;
    result.table.rows.push_back(
        run_test(spec, password, derive_seed(seed, spec.id), &hist));
    result.histograms[spec.id] = std::move(hist);
  }
  return result;
}

std::vector<TestSpec> standard_suite(int trials, uint64_t shots,
                                     const std::string& noise,
                                     verify::VerificationMode mode) {
  std::vector<TestSpec> specs;
  for (int id = 1; id <= 6; ++id) {
    TestSpec spec = TestSpec::standard(id);
    spec.trials = trials;
    spec.shots = shots;
    spec.noise = noise;
    spec.mode = mode;
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace qpauth::game
