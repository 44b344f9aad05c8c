// Copyright 2026 The qmarg Authors
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
#include <cmath>
#include <cstdint>
#include <numbers>

#include "qmarg/qstate/matrix.hpp"

namespace qmarg {

/**
 * SplitMix64: a 64-bit counter advanced by the golden-ratio increment, then
 * mixed by two xor-shift/multiply rounds.
 *
 *   state += 0x9E3779B97F4A7C15
 *   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
 *   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
 *   return z ^ (z >> 31)
 *
 * Only integer arithmetic is involved, so a seed produces the same stream on
 * every platform. Gaussians use Box-Muller on top of it rather than
 * std::normal_distribution, whose algorithm is implementation-defined.
 */
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal pair via Box-Muller.
  std::array<double, 2> normal_pair() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  double normal() noexcept { return normal_pair()[0]; }

  /// Complex normal with independent standard normal parts.
  cplx complex_normal() noexcept {
    const auto p = normal_pair();
    return {p[0], p[1]};
  }

 private:
  std::uint64_t state_;
};

/// Per-task seed from a master seed; independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  SplitMix64 g(master ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return g.next();
}

/// Haar-distributed 2x2 unitary: a random unit quaternion times a random phase.
inline Matrix random_unitary2(SplitMix64& rng) {
  double q[4];
  double s = 0.0;
  do {
    s = 0.0;
    for (double& x : q) {
      x = rng.normal();
      s += x * x;
    }
  } while (s < 1e-300);
  s = std::sqrt(s);
  for (double& x : q) x /= s;
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const cplx ph = std::polar(1.0, phi);
  Matrix u(2, 2);
  u(0, 0) = ph * cplx(q[0], q[1]);
  u(0, 1) = ph * cplx(q[2], q[3]);
  u(1, 0) = ph * cplx(-q[2], q[3]);
  u(1, 1) = ph * cplx(q[0], -q[1]);
  return u;
}

}  // namespace qmarg
