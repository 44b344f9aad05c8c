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

#include <cstddef>

#include "qmarg/error.hpp"
#include "qmarg/qstate/matrix.hpp"
#include "qmarg/qstate/multi_index.hpp"
#include "qmarg/qstate/random.hpp"
#include "qmarg/qstate/states.hpp"

namespace qmarg {

/// chi (n-1 qubits) with the single-qubit vector x inserted at slot j.
inline CVector insert_qubit(std::span<const cplx> chi, std::span<const cplx> x, int n, int j) {
  require_qubit(n, j, "insert_qubit");
  if (chi.size() != dim_of(n - 1) || x.size() != 2) throw InvalidInput("insert_qubit: dimension mismatch");
  CVector out(dim_of(n));
  for (std::size_t r = 0; r < chi.size(); ++r)
    for (unsigned b = 0; b < 2; ++b) out[insert_bit(r, n, j, b)] = chi[r] * x[b];
  return out;
}

/// (<x| at slot j) |v>: an (n-1)-qubit vector. `block` trailing components per
/// system index (an environment register) are carried along untouched.
inline CVector contract_slot(std::span<const cplx> v, std::span<const cplx> x, int n, int j,
                             std::size_t block = 1) {
  require_qubit(n, j, "contract_slot");
  if (v.size() != dim_of(n) * block || x.size() != 2) throw InvalidInput("contract_slot: dimension mismatch");
  const std::size_t rest = dim_of(n - 1);
  CVector out(rest * block);
  for (std::size_t r = 0; r < rest; ++r)
    for (unsigned b = 0; b < 2; ++b) {
      const cplx w = std::conj(x[b]);
      const std::size_t src = insert_bit(r, n, j, b) * block;
      for (std::size_t k = 0; k < block; ++k) out[r * block + k] += w * v[src + k];
    }
  return out;
}

/// (<chi| on every slot except j) |v>: a vector on qubit j (times `block`).
inline CVector contract_rest(std::span<const cplx> v, std::span<const cplx> chi, int n, int j,
                             std::size_t block = 1) {
  require_qubit(n, j, "contract_rest");
  if (v.size() != dim_of(n) * block || chi.size() != dim_of(n - 1))
    throw InvalidInput("contract_rest: dimension mismatch");
  CVector out(2 * block);
  for (std::size_t r = 0; r < chi.size(); ++r) {
    const cplx w = std::conj(chi[r]);
    if (w == cplx{}) continue;
    for (unsigned b = 0; b < 2; ++b) {
      const std::size_t src = insert_bit(r, n, j, b) * block;
      for (std::size_t k = 0; k < block; ++k) out[b * block + k] += w * v[src + k];
    }
  }
  return out;
}

/// Applies the 2x2 matrix u to qubit j of an n-qubit vector.
inline CVector apply_single_qubit(std::span<const cplx> v, const Matrix& u, int n, int j) {
  require_qubit(n, j, "apply_single_qubit");
  if (v.size() != dim_of(n) || u.rows() != 2 || u.cols() != 2)
    throw InvalidInput("apply_single_qubit: dimension mismatch");
  CVector out(v.size());
  for (std::size_t r = 0; r < dim_of(n - 1); ++r) {
    const std::size_t i0 = insert_bit(r, n, j, 0);
    const std::size_t i1 = insert_bit(r, n, j, 1);
    out[i0] = u(0, 0) * v[i0] + u(0, 1) * v[i1];
    out[i1] = u(1, 0) * v[i0] + u(1, 1) * v[i1];
  }
  return out;
}

/// (u_1 (x) ... (x) u_n) v
inline CVector apply_local(std::span<const cplx> v, const std::vector<Matrix>& us) {
  const int n = static_cast<int>(us.size());
  CVector out(v.begin(), v.end());
  for (int j = 1; j <= n; ++j) out = apply_single_qubit(out, us[static_cast<std::size_t>(j - 1)], n, j);
  return out;
}

/// U rho U^H for U = u_1 (x) ... (x) u_n.
inline Matrix conjugate_local(const Matrix& rho, const std::vector<Matrix>& us) {
  const std::size_t d = rho.rows();
  Matrix tmp(d, d);
  // Columns first: U rho, then (U (U rho)^H)^H.
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = apply_local(rho.column(c), us);
    for (std::size_t r = 0; r < d; ++r) tmp(r, c) = col[r];
  }
  Matrix adj = tmp.adjoint();
  Matrix out(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = apply_local(adj.column(c), us);
    for (std::size_t r = 0; r < d; ++r) out(c, r) = std::conj(col[r]);
  }
  return out;
}

/// Tensor product of single-qubit vectors, xs[0] on qubit 1.
inline CVector product_vector(const std::vector<CVector>& xs) {
  CVector out{1.0};
  for (const auto& x : xs) {
    CVector next(out.size() * 2);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t b = 0; b < 2; ++b) next[2 * i + b] = out[i] * x[b];
    out = std::move(next);
  }
  return out;
}

/// n single-qubit unitaries drawn Haar-randomly from `rng`.
inline std::vector<Matrix> random_local_unitaries(int n, SplitMix64& rng) {
  std::vector<Matrix> us;
  us.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) us.push_back(random_unitary2(rng));
  return us;
}

/**
 * Unitarily invariant random pure state: 2^n independent complex Gaussians
 * from SplitMix64(seed), divided by their norm. A deterministic function of
 * (n, seed).
 */
inline PureState haar_random_state(int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxQubits) throw InvalidInput("haar_random_state: n must be in 1.." + std::to_string(kMaxQubits));
  SplitMix64 rng(seed);
  CVector amps(dim_of(n));
  for (auto& a : amps) a = rng.complex_normal();
  const double nrm = norm(amps);
  for (auto& a : amps) a /= nrm;
  return PureState(n, std::move(amps));
}

}  // namespace qmarg
