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

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "qpauth/qcirc.hpp"
#include "qpauth/trapauth.hpp"
#include "qpauth/verify.hpp"

namespace qpauth::testutil {

/// Largest amplitude deviation after aligning global phase on the largest
/// component of `a`.
inline double max_diff_up_to_phase(const qcirc::StateVector& a,
                                   const qcirc::StateVector& b) {
  if (a.size() != b.size()) return 1e9;
  std::size_t ref = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.amps[i]) > std::abs(a.amps[ref])) ref = i;
  }
  if (std::abs(b.amps[ref]) < 1e-12) return 1e9;
  const std::complex<double> phase =
      (a.amps[ref] / std::abs(a.amps[ref])) /
      (b.amps[ref] / std::abs(b.amps[ref]));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.amps[i] - phase * b.amps[i]));
  }
  return worst;
}

// Upper regularized incomplete gamma Q(a, x), series/continued-fraction
// split as in the usual numerical recipes presentation.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 300; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-14) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 300; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

/// Pearson chi-square p-value of observed counts against expected
/// probabilities. Bins with expected count below 5 are pooled.
inline double chi_square_pvalue(const std::map<std::string, uint64_t>& counts,
                                const std::map<std::string, double>& expected,
                                uint64_t shots) {
  double stat = 0.0;
  int bins = 0;
  double pooled_exp = 0.0;
  uint64_t pooled_obs = 0;
  uint64_t seen = 0;
  for (const auto& [key, p] : expected) {
    const double exp_count = p * static_cast<double>(shots);
    auto it = counts.find(key);
    const uint64_t obs = it == counts.end() ? 0 : it->second;
    seen += obs;
    if (exp_count < 5.0) {
      pooled_exp += exp_count;
      pooled_obs += obs;
      continue;
    }
    const double d = static_cast<double>(obs) - exp_count;
    stat += d * d / exp_count;
    ++bins;
  }
  // Any mass observed outside the expected support is a hard failure.
  if (seen != shots) return 0.0;
  if (pooled_exp > 0.0) {
    const double d = static_cast<double>(pooled_obs) - pooled_exp;
    stat += d * d / pooled_exp;
    ++bins;
  }
  if (bins < 2) return 1.0;
  return gamma_q((bins - 1) / 2.0, stat / 2.0);
}

/// Exact accept probability of a verification pipeline, by Born-rule
/// enumeration of the final statevector and per-readout classical
/// post-processing. Independent of the sampling path.
inline double exact_pass_probability(const trapauth::PasswordProgram& program,
                                     const trapauth::KeySet& attempt,
                                     const qcirc::PauliFrame& program_frame,
                                     verify::VerificationMode mode) {
  const qcirc::Circuit circuit =
      verify::build_verification(program, attempt, mode);
  const auto dist = qcirc::ideal_distribution(circuit);
  double accept = 0.0;
  for (const auto& [bits, p] : dist) {
    qcirc::CountsMap one;
    one.add(bits);
    const auto outcome = verify::postprocess(one, attempt, program_frame, mode);
    accept += p * outcome.pass_fraction;
  }
  return accept;
}

inline trapauth::Salt salt_from(uint64_t v) {
  trapauth::Salt salt{};
  for (int i = 0; i < 8; ++i) salt[i] = static_cast<uint8_t>(v >> (8 * i));
  return salt;
}

}  // namespace qpauth::testutil
