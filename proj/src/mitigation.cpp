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

#include "qpauth/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qpauth/rng.hpp"

namespace qpauth::mitigation {

namespace {

std::string index_bits(uint64_t v, int width) {
  std::string s(width, '0');
  for (int i = 0; i < width; ++i) {
    if (v & (1ull << (width - 1 - i))) s[i] = '1';
  }
  return s;
}

uint64_t bits_index(const std::string& s) {
  uint64_t v = 0;
  for (char c : s) v = (v << 1) | (c == '1');
  return v;
}

qcirc::NoiseModel readout_only(const qcirc::NoiseModel& noise) {
  qcirc::NoiseModel m = noise;
  m.p1 = 0.0;
  m.p2 = 0.0;
  return m;
}

// Samples the register prepared in computational state `prep`.
qcirc::CountsMap sample_basis_state(uint64_t prep,
                                    const std::vector<int>& qubits,
                                    const qcirc::NoiseModel& noise,
                                    uint64_t shots, uint64_t seed) {
  const int top = *std::max_element(qubits.begin(), qubits.end());
  qcirc::Circuit c(top + 1);
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (prep & (1ull << (qubits.size() - 1 - i))) {
      c.push(qcirc::Gate::x(qubits[i]));
    }
  }
  for (int q : qubits) c.measure(q);
  return qcirc::sample(c, shots, readout_only(noise), seed);
}

void solve_dense(std::vector<std::vector<double>> m, std::vector<double>& x) {
  const std::size_t n = x.size();
  double max_pivot = 0.0, min_pivot = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    std::swap(x[col], x[pivot]);
    const double p = std::abs(m[col][col]);
    max_pivot = std::max(max_pivot, p);
    min_pivot = col == 0 ? p : std::min(min_pivot, p);
    if (p < 1e-12) {
      throw std::runtime_error(
          "singular calibration matrix (condition estimate " +
          std::to_string(min_pivot > 0 ? max_pivot / min_pivot : INFINITY) +
          ")");
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (std::size_t c2 = col; c2 < n; ++c2) m[r][c2] -= f * m[col][c2];
      x[r] -= f * x[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) x[i] /= m[i][i];
}

std::vector<double> forward_apply(const CalibrationMatrix& cal,
                                  const std::vector<double>& truth) {
  const std::size_t dim = truth.size();
  std::vector<double> observed(dim, 0.0);
  if (cal.method == Method::Complete) {
    for (std::size_t t = 0; t < dim; ++t) {
      if (truth[t] == 0.0) continue;
      for (std::size_t r = 0; r < dim; ++r) {
        observed[r] += cal.full[t][r] * truth[t];
      }
    }
    return observed;
  }
  observed = truth;
  const int k = cal.width();
  for (int i = 0; i < k; ++i) {
    const auto& m = cal.single[i];
    const uint64_t bit = 1ull << (k - 1 - i);
    for (uint64_t v = 0; v < dim; ++v) {
      if (v & bit) continue;
      const double p0 = observed[v], p1 = observed[v | bit];
      observed[v] = m[0][0] * p0 + m[1][0] * p1;
      observed[v | bit] = m[0][1] * p0 + m[1][1] * p1;
    }
  }
  return observed;
}

void project_to_simplex(std::vector<double>& x) {
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double acc = 0.0, theta = 0.0;
  int support = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    acc += sorted[i];
    const double t = (acc - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0) {
      theta = t;
      support = static_cast<int>(i + 1);
    }
  }
  (void)support;
  for (auto& v : x) v = std::max(0.0, v - theta);
}

}  // namespace

nlohmann::json CalibrationMatrix::to_json() const {
  nlohmann::json j;
  j["method"] = method == Method::Tensored ? "tensored" : "complete";
  j["qubits"] = qubits;
  j["shots_per_state"] = shots_per_state;
  if (method == Method::Tensored) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& m : single) {
      rows.push_back({{m[0][0], m[0][1]}, {m[1][0], m[1][1]}});
    }
    j["single"] = rows;
  } else {
    j["full"] = full;
  }
  return j;
}

CalibrationMatrix CalibrationMatrix::from_json(const nlohmann::json& j) {
  CalibrationMatrix cal;
  const auto method = j.at("method").get<std::string>();
  if (method == "tensored") {
    cal.method = Method::Tensored;
  } else if (method == "complete") {
    cal.method = Method::Complete;
  } else {
    throw std::invalid_argument("unknown calibration method");
  }
  cal.qubits = j.at("qubits").get<std::vector<int>>();
  cal.shots_per_state = j.at("shots_per_state").get<uint64_t>();
  if (cal.method == Method::Tensored) {
    for (const auto& row : j.at("single")) {
      qcirc::Confusion m{{{row[0][0], row[0][1]}, {row[1][0], row[1][1]}}};
      cal.single.push_back(m);
    }
  } else {
    cal.full = j.at("full").get<std::vector<std::vector<double>>>();
  }
  return cal;
}

CalibrationMatrix calibrate(const qcirc::NoiseModel& noise,
                            const std::vector<int>& qubits, uint64_t shots,
                            Method method, uint64_t seed) {
  if (qubits.empty()) throw std::invalid_argument("no qubits to calibrate");
  const int k = static_cast<int>(qubits.size());
  if (method == Method::Complete && k > kMaxCompleteQubits) {
    throw std::invalid_argument(
        "complete calibration limited to 6 qubits; use tensored");
  }
  CalibrationMatrix cal;
  cal.method = method;
  cal.qubits = qubits;
  cal.shots_per_state = shots;

  if (method == Method::Tensored) {
    // Two circuits suffice: all zeros and all ones.
    const auto zeros =
        sample_basis_state(0, qubits, noise, shots, derive_seed(seed, 0));
    const auto ones = sample_basis_state((1ull << k) - 1, qubits, noise,
                                         shots, derive_seed(seed, 1));
    cal.single.assign(k, qcirc::Confusion{});
    std::vector<uint64_t> ones_read0(k, 0), zeros_read1(k, 0);
    for (const auto& [bits, n] : zeros.counts) {
      for (int i = 0; i < k; ++i) {
        if (bits[i] == '1') zeros_read1[i] += n;
      }
    }
    for (const auto& [bits, n] : ones.counts) {
      for (int i = 0; i < k; ++i) {
        if (bits[i] == '0') ones_read0[i] += n;
      }
    }
    for (int i = 0; i < k; ++i) {
      const double e0 = static_cast<double>(zeros_read1[i]) / shots;
      const double e1 = static_cast<double>(ones_read0[i]) / shots;
      cal.single[i] = {{{1.0 - e0, e0}, {e1, 1.0 - e1}}};
    }
    return cal;
  }

  const uint64_t dim = 1ull << k;
  cal.full.assign(dim, std::vector<double>(dim, 0.0));
  for (uint64_t prep = 0; prep < dim; ++prep) {
    const auto counts = sample_basis_state(prep, qubits, noise, shots,
                                           derive_seed(seed, prep));
    for (const auto& [bits, n] : counts.counts) {
      cal.full[prep][bits_index(bits)] =
          static_cast<double>(n) / static_cast<double>(shots);
    }
  }
  return cal;
}

std::map<std::string, double> mitigate(const qcirc::CountsMap& raw,
                                       const CalibrationMatrix& cal,
                                       bool constrained) {
  if (raw.shots == 0) throw std::invalid_argument("empty counts");
  const int k = cal.width();
  const uint64_t dim = 1ull << k;
  std::vector<double> f(dim, 0.0);
  for (const auto& [bits, n] : raw.counts) {
    if (static_cast<int>(bits.size()) != k) {
      throw std::invalid_argument("counts width does not match calibration");
    }
    f[bits_index(bits)] = static_cast<double>(n) / raw.shots;
  }

  std::vector<double> x;
  if (constrained) {
    // Projected-gradient nonnegative least squares on the simplex.
    x.assign(dim, 1.0 / static_cast<double>(dim));
    const double step = 0.8;  // forward model is near-stochastic, |A| ~ 1
    for (int iter = 0; iter < 400; ++iter) {
      const std::vector<double> pred = forward_apply(cal, x);
      std::vector<double> residual(dim);
      for (uint64_t i = 0; i < dim; ++i) residual[i] = pred[i] - f[i];
      // gradient = A^T residual; reuse forward with the transposed blocks
      std::vector<double> grad(dim, 0.0);
      if (cal.method == Method::Complete) {
        for (uint64_t t = 0; t < dim; ++t) {
          double acc = 0.0;
          for (uint64_t r = 0; r < dim; ++r) {
            acc += cal.full[t][r] * residual[r];
          }
          grad[t] = acc;
        }
      } else {
        grad = residual;
        for (int i = 0; i < k; ++i) {
          const auto& m = cal.single[i];
          const uint64_t bit = 1ull << (k - 1 - i);
          for (uint64_t v = 0; v < dim; ++v) {
            if (v & bit) continue;
            const double g0 = grad[v], g1 = grad[v | bit];
            grad[v] = m[0][0] * g0 + m[0][1] * g1;
            grad[v | bit] = m[1][0] * g0 + m[1][1] * g1;
          }
        }
      }
      for (uint64_t i = 0; i < dim; ++i) x[i] -= step * grad[i];
      project_to_simplex(x);
    }
  } else {
    x = f;
    if (cal.method == Method::Complete) {
      // Solve (full^T) x = f.
      std::vector<std::vector<double>> m(dim, std::vector<double>(dim));
      for (uint64_t t = 0; t < dim; ++t) {
        for (uint64_t r = 0; r < dim; ++r) m[r][t] = cal.full[t][r];
      }
      solve_dense(std::move(m), x);
    } else {
      for (int i = 0; i < k; ++i) {
        const auto& m = cal.single[i];
        const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if (std::abs(det) < 1e-9) {
          throw std::runtime_error(
              "singular per-qubit calibration (condition estimate " +
              std::to_string(1.0 / std::max(std::abs(det), 1e-300)) + ")");
        }
        const uint64_t bit = 1ull << (k - 1 - i);
        for (uint64_t v = 0; v < dim; ++v) {
          if (v & bit) continue;
          const double p0 = x[v], p1 = x[v | bit];
          x[v] = (m[1][1] * p0 - m[1][0] * p1) / det;
          x[v | bit] = (-m[0][1] * p0 + m[0][0] * p1) / det;
        }
      }
    }
    // Clip-and-renormalize: negative quasi-probabilities are zeroed.
    double total = 0.0;
    for (auto& v : x) {
      v = std::max(0.0, v);
      total += v;
    }
    if (total <= 0.0) throw std::runtime_error("mitigation produced no mass");
    for (auto& v : x) v /= total;
  }

  std::map<std::string, double> result;
  for (uint64_t v = 0; v < dim; ++v) {
    if (x[v] > 0.0) result[index_bits(v, k)] = x[v];
  }
  return result;
}

double total_variation(const std::map<std::string, double>& a,
                       const std::map<std::string, double>& b) {
  double acc = 0.0;
  for (const auto& [key, pa] : a) {
    auto it = b.find(key);
    acc += std::abs(pa - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [key, pb] : b) {
    if (!a.count(key)) acc += pb;
  }
  return acc / 2.0;
}

}  // namespace qpauth::mitigation
