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

#include <omp.h>

#include <nlohmann/json.hpp>

#include "qpauth/game.hpp"
#include "test_util.hpp"

using namespace qpauth;
using game::Injection;
using game::TestSpec;
using trapauth::Password;
using verify::VerificationMode;

TEST_CASE("one-bit challenge distribution is exactly balanced") {
  game::ChallengeDistribution dist{{0}};
  Rng rng(17);
  int zeros = 0;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    const auto x = game::sample_challenge(dist, rng);
    REQUIRE(x.size() == 1);
    zeros += x[0] == 0;
  }
  const double f = static_cast<double>(zeros) / draws;
  CHECK(f > 0.49);  // 4 sigma ~ 0.01
  CHECK(f < 0.51);
}

TEST_CASE("challenge distribution returns the point half the time") {
  std::vector<uint8_t> point(8);
  Rng seed_rng(3);
  for (auto& b : point) b = seed_rng.below(2);
  game::ChallengeDistribution dist{point};
  Rng rng(23);
  int hits = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    if (game::sample_challenge(dist, rng) == point) ++hits;
  }
  const double f = static_cast<double>(hits) / draws;
  CHECK(f > 0.48);
  CHECK(f < 0.52);
}

TEST_CASE("uniform branch never emits the point") {
  // Drive the sampler with the branch coin forced to the uniform side by
  // checking every non-point draw across many samples.
  std::vector<uint8_t> point{1, 0, 1};
  game::ChallengeDistribution dist{point};
  Rng rng(29);
  int non_point = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto x = game::sample_challenge(dist, rng);
    if (x != point) {
      ++non_point;
      CHECK(x.size() == 3);
    }
  }
  CHECK(non_point > 40000);
}

TEST_CASE("test spec validation") {
  TestSpec spec = TestSpec::standard(3);
  CHECK(spec.injection == Injection::XError);
  spec.injection = Injection::ZError;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  CHECK_THROWS_AS(game::injection_for_test(7), std::invalid_argument);
  TestSpec bad = TestSpec::standard(1);
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("rate records are deterministic and thread-count independent") {
  TestSpec spec = TestSpec::standard(2);
  spec.trials = 6;
  spec.shots = 800;
  const Password password{"determinism"};

  const auto a = game::run_test(spec, password, 99);
  const auto b = game::run_test(spec, password, 99);
  CHECK(a.to_json() == b.to_json());

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto c = game::run_test(spec, password, 99);
  omp_set_num_threads(saved);
  CHECK(a.to_json() == c.to_json());
}

TEST_CASE("test labels route to the correct rate columns") {
  const Password password{"labels"};
  TestSpec t1 = TestSpec::standard(1);
  t1.trials = 3;
  t1.shots = 200;
  const auto r1 = game::run_test(t1, password, 5);
  CHECK(r1.fp_trials == 0);
  CHECK(r1.tp_trials == 3);
  CHECK(r1.true_positive.has_value());
  CHECK(!r1.false_positive.has_value());

  for (int id : {2, 3, 4, 5}) {
    TestSpec spec = TestSpec::standard(id);
    spec.trials = 3;
    spec.shots = 200;
    const auto r = game::run_test(spec, password, 5);
    CHECK(r.tp_trials == 0);
    CHECK(r.fp_trials == 3);
  }
}

TEST_CASE("ideal backend: correct challenge at 100%, injected errors at 0%") {
  const Password password{"ideal-rates"};

  TestSpec t1 = TestSpec::standard(1);
  t1.trials = 4;
  t1.shots = 1500;
  t1.mode = VerificationMode::BitAndPhase;
  CHECK(*game::run_test(t1, password, 11).true_positive == 1.0);

  // Z errors break the syndrome in either mode; X errors need the bit check.
  for (int target = 0; target < trapauth::kProgramQubits; target += 5) {
    TestSpec t4 = TestSpec::standard(4);
    t4.trials = 2;
    t4.shots = 500;
    t4.target_qubit = target;
    CHECK(*game::run_test(t4, password, 13).false_positive == 0.0);

    TestSpec t3 = TestSpec::standard(3);
    t3.trials = 2;
    t3.shots = 500;
    t3.target_qubit = target;
    t3.mode = VerificationMode::BitAndPhase;
    CHECK(*game::run_test(t3, password, 13).false_positive == 0.0);
  }

  TestSpec t5 = TestSpec::standard(5);
  t5.trials = 4;
  t5.shots = 500;
  CHECK(*game::run_test(t5, password, 17).false_positive == 0.0);
}

TEST_CASE("test 6 splits by the observed challenge draw") {
  TestSpec spec = TestSpec::standard(6);
  spec.trials = 10;
  spec.shots = 400;
  const Password password{"split"};
  const auto r = game::run_test(spec, password, 21);
  CHECK(r.tp_trials + r.fp_trials == 10);
  CHECK(r.tp_trials > 0);  // seed-dependent but fixed
  CHECK(r.fp_trials > 0);
  // Mixture check: overall mean equals the split-weighted sub-rates.
  double overall = 0.0;
  for (const auto& t : r.per_trial) overall += t.pass_fraction;
  overall /= r.trials;
  const double mixture =
      (*r.true_positive * r.tp_trials + *r.false_positive * r.fp_trials) /
      r.trials;
  CHECK(overall == doctest::Approx(mixture).epsilon(1e-12));
}

TEST_CASE("suite emits one row per test plus histograms") {
  const auto specs = game::standard_suite(2, 300, "ideal",
                                          VerificationMode::BitAndPhase);
  const auto result = game::run_suite(specs, Password{"suite"}, 31);
  REQUIRE(result.table.rows.size() == 6);
  CHECK(*result.table.rows[0].true_positive == 1.0);
  CHECK(*result.table.rows[2].false_positive == 0.0);
  CHECK(*result.table.rows[3].false_positive == 0.0);
  CHECK(*result.table.rows[4].false_positive == 0.0);
  CHECK(*result.table.rows[1].false_positive < 1.0);  // perm error, see notes

  for (int id = 1; id <= 6; ++id) {
    const auto& hist = result.histograms.at(id);
    CHECK(hist.raw.shots == 300);
    CHECK(hist.post.shots == 300);
    CHECK(hist.raw.counts.begin()->first.size() == 20);
  }

  const std::string csv = result.table.to_csv();
  CHECK(csv.find("test,tp,fp") == 0);
  CHECK(result.table.to_json().size() == 6);
}

TEST_CASE("mock-device preset keeps the expected outcome near ten percent") {
  TestSpec spec = TestSpec::standard(1);
  spec.trials = 3;
  spec.shots = 5000;
  spec.noise = "mock-device";
  const auto r = game::run_test(spec, Password{"noisy"}, 41);
  CHECK(*r.true_positive > 0.05);
  CHECK(*r.true_positive < 0.20);
}
