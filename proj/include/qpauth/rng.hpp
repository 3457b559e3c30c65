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

namespace qpauth {

/// Deterministic, platform-independent PRNG (splitmix64). All randomness in
/// the simulation layer flows through this generator so that a fixed seed
/// reproduces results bit-for-bit regardless of standard library or thread
/// count.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Multiply-shift reduction; bias is O(n/2^64).
  uint32_t below(uint32_t n) {
    return static_cast<uint32_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  uint64_t state_;
};

/// Derives an independent stream seed from (master, index). Used for
/// per-shot and per-trial generators: parallel execution over indices
/// reproduces the serial result exactly.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  uint64_t h = master ^ (0x9e3779b97f4a7c15ull + (index << 1));
  h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  Rng r(h);
  r.next();
  return r.next();
}

}  // namespace qpauth
