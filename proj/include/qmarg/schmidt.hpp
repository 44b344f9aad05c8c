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
#include <sstream>
#include <vector>

#include "qmarg/error.hpp"
#include "qmarg/qstate.hpp"
#include "qmarg/rdm.hpp"
#include "qmarg/tolerances.hpp"

namespace qmarg {

/// psi = sum_i sqrt(q_i) chi_i (x) alpha_i, alpha on qubit j.
///
/// On a product split (q_1 <= 1e-12) alpha[1] is left empty: only the i = 0
/// term of the decomposition is defined. chi[1] is still the solver's second
/// eigenvector. At q_0 = q_1 the vectors are whatever the solver returned.
struct SchmidtSplit {
  int n = 0;
  int j = 0;
  std::array<double, 2> q{};
  std::array<CVector, 2> chi;
  std::array<CVector, 2> alpha;

  bool product() const noexcept { return alpha[1].empty(); }
};

inline SchmidtSplit schmidt_split(const PureState& psi, int j) {
  const int n = psi.n();
  if (n < 2) throw InvalidInput("schmidt_split: n >= 2 required");
  require_qubit(n, j, "schmidt_split");

  const auto eig = hermitian_eig(partial_trace(psi.projector_matrix(), n, {j}));
  const std::size_t m = eig.size();
  double tail = 0.0;
  for (std::size_t k = 0; k + 2 < m; ++k) tail += std::abs(eig.values[k]);
  if (tail > tol::kReconstruction) {
    std::ostringstream os;
    os << "schmidt_split: " << m - 2 << " trailing eigenvalues sum to " << tail << " (expected 0)";
    throw NumericalFailure(os.str());
  }

  SchmidtSplit s;
  s.n = n;
  s.j = j;
  for (int i = 0; i < 2; ++i) {
    const std::size_t col = m - 1 - static_cast<std::size_t>(i);
    s.q[static_cast<std::size_t>(i)] = eig.values[col];
    s.chi[static_cast<std::size_t>(i)] = eig.vector(col);
  }
  for (std::size_t i = 0; i < 2; ++i) {
    if (!(s.q[i] > tol::kProductSplit)) continue;
    CVector a = contract_rest(psi.span(), s.chi[i], n, j);
    const double nrm = norm(a);
    for (auto& x : a) x /= nrm;
    // alpha gets the canonical phase; chi absorbs the inverse so chi (x) alpha is unchanged.
    const cplx ph = canonicalize_phase(a);
    for (auto& x : s.chi[i]) x *= std::conj(ph);
    s.alpha[i] = std::move(a);
  }
  return s;
}

/// sum_i sqrt(q_i) chi_i (x) alpha_i over the defined terms.
inline CVector reconstruct(const SchmidtSplit& s) {
  CVector out(dim_of(s.n));
  for (std::size_t i = 0; i < 2; ++i) {
    if (s.alpha[i].empty()) continue;
    const auto term = insert_qubit(s.chi[i], s.alpha[i], s.n, s.j);
    const double w = std::sqrt(std::max(s.q[i], 0.0));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * term[k];
  }
  return out;
}

/// Joint vector on the n qubits and an environment of dimension env_dim,
/// flat index s * env_dim + k.
struct Purification {
  int n = 0;
  std::size_t env_dim = 0;
  CVector omega;
};

inline Purification purify(const DensityMatrix& w) {
  const auto eig = hermitian_eig(w.matrix());
  Purification p;
  p.n = w.n();
  std::vector<std::size_t> kept;
  for (std::size_t k = eig.size(); k-- > 0;)
    if (eig.values[k] > tol::kPurifyRank) kept.push_back(k);
  p.env_dim = kept.size();
  if (p.env_dim == 0) throw NumericalFailure("purify: no eigenvalue above the rank threshold");
  p.omega.assign(w.dim() * p.env_dim, cplx{});
  for (std::size_t k = 0; k < p.env_dim; ++k) {
    const double s = std::sqrt(eig.values[kept[k]]);
    for (std::size_t row = 0; row < w.dim(); ++row) p.omega[row * p.env_dim + k] = s * eig.vectors(row, kept[k]);
  }
  return p;
}

/// tr_E |Omega><Omega|.
inline Matrix reduced_system(const Purification& p) {
  const std::size_t d = dim_of(p.n), r = p.env_dim;
  Matrix m(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      cplx s{};
      for (std::size_t k = 0; k < r; ++k) s += p.omega[a * r + k] * std::conj(p.omega[b * r + k]);
      m(a, b) = s;
    }
  return m;
}

/// Environment vectors for one qubit j. Layouts: big_e[i] is (qubit j) x env,
/// index b * env_dim + k; omega_split[r] is (other qubits) x env, index
/// rest * env_dim + k; small[i][r] lives on the environment alone.
///
/// On a product split only the i = 0 row exists (big_e[1], small[1][*] and
/// omega_split[1] are empty). small[0][1] is then taken against the
/// orthogonal complement of alpha_0, which the split itself leaves undefined.
struct EnvVectors {
  int j = 0;
  std::size_t env_dim = 0;
  SchmidtSplit split;
  std::array<CVector, 2> big_e;
  std::array<std::array<CVector, 2>, 2> small;
  std::array<CVector, 2> omega_split;

  bool product() const noexcept { return split.product(); }
  const CVector& e(unsigned i, unsigned r) const { return small.at(i).at(r); }
};

namespace detail {

inline CVector orthogonal_complement(std::span<const cplx> a) { return {-std::conj(a[1]), std::conj(a[0])}; }

// <x| on the qubit factor of a (qubit x env) vector.
inline CVector contract_qubit(std::span<const cplx> big, std::span<const cplx> x, std::size_t r) {
  CVector out(r);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t k = 0; k < r; ++k) out[k] += std::conj(x[b]) * big[b * r + k];
  return out;
}

}  // namespace detail

/// Set check_rdms = false only to study purifications that are deliberately
/// not compatible with psi.
inline EnvVectors extract_env_vectors(const Purification& p, const PureState& psi, int j, bool check_rdms = true) {
  if (p.n != psi.n()) throw InvalidInput("extract_env_vectors: purification and state have different qubit counts");
  if (p.omega.size() != dim_of(p.n) * p.env_dim) throw InvalidInput("extract_env_vectors: malformed purification");
  if (check_rdms) require_same_rdms(reduced_system(p), psi.projector_matrix(), p.n, tol::kRdmEqual, "extract_env_vectors");

  EnvVectors env;
  env.j = j;
  env.env_dim = p.env_dim;
  env.split = schmidt_split(psi, j);
  const auto& s = env.split;
  const std::size_t r = p.env_dim;

  for (std::size_t i = 0; i < 2; ++i) {
    if (s.alpha[i].empty()) continue;
    env.big_e[i] = contract_rest(p.omega, s.chi[i], p.n, j, r);
    for (auto& x : env.big_e[i]) x /= std::sqrt(s.q[i]);
    env.omega_split[i] = contract_slot(p.omega, s.alpha[i], p.n, j, r);
    for (auto& x : env.omega_split[i]) x /= std::sqrt(s.q[i]);
  }
  const CVector alpha1 = s.product() ? detail::orthogonal_complement(s.alpha[0]) : s.alpha[1];
  const std::array<const CVector*, 2> basis{&s.alpha[0], &alpha1};
  for (std::size_t i = 0; i < 2; ++i) {
    if (env.big_e[i].empty()) continue;
    for (std::size_t rr = 0; rr < 2; ++rr) env.small[i][rr] = detail::contract_qubit(env.big_e[i], *basis[rr], r);
  }
  return env;
}

/// Worst deviation of each relation satisfied by a compatible purification.
struct EnvResiduals {
  double big_e_orthonormality = 0.0;    // <E_i'|E_i> = delta
  double omega_orthonormality = 0.0;    // <Omega_r'|Omega_r> = delta
  double first_env_relation = 0.0;      // sum_r <e_i'r|e_ir> = delta
  double second_env_relation = 0.0;     // sum_i q_i <e_ir'|e_ir> = q_r delta
  double consistency = 0.0;             // sqrt(q_r) Omega_r = sum_i sqrt(q_i) chi_i (x) e_ir

  double max() const {
    return std::max({big_e_orthonormality, omega_orthonormality, first_env_relation, second_env_relation, consistency});
  }
};

inline EnvResiduals env_residuals(const EnvVectors& env) {
  EnvResiduals res;
  const auto& s = env.split;
  const std::size_t r = env.env_dim;
  auto delta = [](std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; };
  auto present = [&](std::size_t i) { return !env.big_e[i].empty(); };
  // Treat absent vectors as zero and q_1 as exactly zero on a product split.
  auto q = [&](std::size_t i) { return present(i) ? s.q[i] : 0.0; };

  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      if (present(a) && present(b)) {
        res.big_e_orthonormality =
            std::max(res.big_e_orthonormality, std::abs(inner(env.big_e[a], env.big_e[b]) - delta(a, b)));
        res.omega_orthonormality =
            std::max(res.omega_orthonormality, std::abs(inner(env.omega_split[a], env.omega_split[b]) - delta(a, b)));
        cplx s1{};
        for (std::size_t rr = 0; rr < 2; ++rr) s1 += inner(env.small[a][rr], env.small[b][rr]);
        res.first_env_relation = std::max(res.first_env_relation, std::abs(s1 - delta(a, b)));
      }
      cplx s2{};
      for (std::size_t i = 0; i < 2; ++i)
        if (present(i)) s2 += q(i) * inner(env.small[i][a], env.small[i][b]);
      res.second_env_relation = std::max(res.second_env_relation, std::abs(s2 - q(a) * delta(a, b)));
    }

  const std::size_t rest = dim_of(s.n - 1);
  for (std::size_t rr = 0; rr < 2; ++rr) {
    CVector diff(rest * r);
    if (present(rr))
      for (std::size_t x = 0; x < diff.size(); ++x) diff[x] = std::sqrt(s.q[rr]) * env.omega_split[rr][x];
    for (std::size_t i = 0; i < 2; ++i) {
      if (!present(i)) continue;
      const double w = std::sqrt(s.q[i]);
      for (std::size_t c = 0; c < rest; ++c)
        for (std::size_t k = 0; k < r; ++k) diff[c * r + k] -= w * s.chi[i][c] * env.small[i][rr][k];
    }
    res.consistency = std::max(res.consistency, norm(diff));
  }
  return res;
}

namespace detail {

// Rows are <alpha_0| and <alpha_1|.
inline Matrix alpha_adjoint(const SchmidtSplit& s, const char* where) {
  if (s.product()) {
    std::ostringstream os;
    os << where << ": qubit " << s.j << " splits off as a product; the main constraint needs both alpha vectors";
    throw InvalidInput(os.str());
  }
  Matrix a(2, 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t b = 0; b < 2; ++b) a(r, b) = std::conj(s.alpha[r][b]);
  return a;
}

// Residual of the main constraint at multi-index `flat`, given psi's
// coefficients c in a basis that uses alpha^j at slot j and alpha^k at slot k.
inline double main_constraint_at(const EnvVectors& ej, const EnvVectors& ek, std::span<const cplx> c, int n,
                                 std::size_t flat) {
  const unsigned ij = get_bit(flat, n, ej.j), ik = get_bit(flat, n, ek.j);
  const std::size_t flip_j = flat ^ (std::size_t{1} << bit_position(n, ej.j));
  const std::size_t flip_k = flat ^ (std::size_t{1} << bit_position(n, ek.j));
  const auto& a = ej.e(ij, ij);
  const auto& b = ej.e(1 - ij, ij);
  const auto& x = ek.e(ik, ik);
  const auto& y = ek.e(1 - ik, ik);
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    s += std::norm(c[flat] * a[t] + c[flip_j] * b[t] - c[flat] * x[t] - c[flip_k] * y[t]);
  return std::sqrt(s);
}

inline CVector coefficients_for_pair(const EnvVectors& ej, const EnvVectors& ek, const PureState& psi) {
  const auto v = apply_single_qubit(psi.span(), alpha_adjoint(ej.split, "main_constraint_residual"), psi.n(), ej.j);
  return apply_single_qubit(v, alpha_adjoint(ek.split, "main_constraint_residual"), psi.n(), ek.j);
}

inline void check_pair(const EnvVectors& ej, const EnvVectors& ek, const PureState& psi) {
  if (ej.j == ek.j) throw InvalidInput("main_constraint_residual: j and k must differ");
  if (ej.env_dim != ek.env_dim) throw InvalidInput("main_constraint_residual: environment dimensions differ");
  if (ej.split.n != psi.n() || ek.split.n != psi.n())
    throw InvalidInput("main_constraint_residual: qubit count mismatch");
}

}  // namespace detail

/// Norm of c_I e^j_{i_j i_j} + c_{I_j} e^j_{i_j^c i_j} - c_I e^k_{i_k i_k} - c_{I_k} e^k_{i_k^c i_k}.
/// c_I are psi's amplitudes with alpha^j at slot j and alpha^k at slot k; the
/// constraint holds in any fixed basis on the remaining slots, so those stay
/// computational.
inline double main_constraint_residual(const EnvVectors& env_j, const EnvVectors& env_k, const PureState& psi,
                                       const MultiIndex& idx) {
  detail::check_pair(env_j, env_k, psi);
  if (idx.n() != psi.n()) throw InvalidInput("main_constraint_residual: multi-index has the wrong length");
  const auto c = detail::coefficients_for_pair(env_j, env_k, psi);
  return detail::main_constraint_at(env_j, env_k, c, psi.n(), idx.flat());
}

/// Maximum over every multi-index and every ordered pair j != k.
inline double max_main_constraint_residual(const std::vector<EnvVectors>& envs, const PureState& psi) {
  double worst = 0.0;
  for (const auto& ej : envs)
    for (const auto& ek : envs) {
      if (ej.j == ek.j) continue;
      detail::check_pair(ej, ek, psi);
      const auto c = detail::coefficients_for_pair(ej, ek, psi);
      for (std::size_t f = 0; f < psi.dim(); ++f)
        worst = std::max(worst, detail::main_constraint_at(ej, ek, c, psi.n(), f));
    }
  return worst;
}

/// True iff psi = (qubit j state) (x) (rest), judged by q_1 <= tol. The
/// amplitude-ratio form is checked alongside: the squared 2x2 minors of the
/// (qubit j) x (rest) coefficient matrix sum to q_0 q_1, so their sum divided by
/// q_0 is compared against the same tolerance.
inline bool product_split_test(const PureState& psi, int j, double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidInput("product_split_test: tolerance must be positive");
  const auto s = schmidt_split(psi, j);
  const int n = psi.n();
  const std::size_t rest = dim_of(n - 1);
  double minors = 0.0;
  for (std::size_t a = 0; a < rest; ++a)
    for (std::size_t b = a + 1; b < rest; ++b) {
      const cplx m = psi[insert_bit(a, n, j, 0)] * psi[insert_bit(b, n, j, 1)] -
                     psi[insert_bit(a, n, j, 1)] * psi[insert_bit(b, n, j, 0)];
      minors += std::norm(m);
    }
  const double spectral = std::max(s.q[1], 0.0);
  const double ratio = minors / s.q[0];
  const bool by_spectrum = spectral <= tolerance;
  const bool by_ratio = ratio <= tolerance;
  if ((by_spectrum && ratio > 10 * tolerance) || (by_ratio && spectral > 10 * tolerance)) {
    std::ostringstream os;
    os << "product_split_test: spectral (q1 = " << spectral << ") and amplitude-ratio (" << ratio
       << ") tests disagree at qubit " << j;
    throw NumericalFailure(os.str());
  }
  return by_spectrum;
}

}  // namespace qmarg
