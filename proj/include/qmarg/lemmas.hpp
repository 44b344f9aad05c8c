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

// Numerical checks of the four lemmas about environment vectors. Each check
// scans for instances where a lemma's hypothesis holds and records whether the
// conclusion does too.

#include <cmath>
#include <vector>

#include "qmarg/error.hpp"
#include "qmarg/qstate.hpp"
#include "qmarg/schmidt.hpp"

namespace qmarg {

/// Everything the lemmas talk about for one (psi, Omega) pair: environment
/// vectors for every qubit and psi's coefficients in the basis
/// alpha^1 (x) ... (x) alpha^n.
struct ProofContext {
  PureState psi;
  std::vector<EnvVectors> envs;
  CVector coeffs;

  int n() const noexcept { return psi.n(); }
  const EnvVectors& env(int j) const { return envs.at(static_cast<std::size_t>(j - 1)); }
};

inline ProofContext make_proof_context(const Purification& p, const PureState& psi, bool check_rdms = true) {
  ProofContext ctx{psi, {}, {}};
  CVector c(psi.amps());
  for (int j = 1; j <= psi.n(); ++j) {
    ctx.envs.push_back(extract_env_vectors(p, psi, j, check_rdms && j == 1));
    c = apply_single_qubit(c, detail::alpha_adjoint(ctx.envs.back().split, "make_proof_context"), psi.n(), j);
  }
  ctx.coeffs = std::move(c);
  return ctx;
}

struct LemmaTally {
  std::size_t applicable = 0;  // instances where the hypothesis holds
  std::size_t held = 0;        // ... and the conclusion holds
  double worst = 0.0;          // largest conclusion quantity seen among applicable instances

  bool ok() const noexcept { return held == applicable; }
};

/// Thresholds for treating coefficients and vectors as zero or nonzero.
struct LemmaThresholds {
  double zero = 1e-12;     // |c| or ||e|| at or below this counts as 0 in a hypothesis
  double nonzero = 1e-3;   // |c| above this counts as nonzero in a hypothesis
  double conclusion = 1e-8;
};

namespace detail {

inline std::size_t flip(std::size_t flat, int n, int j) { return flat ^ (std::size_t{1} << bit_position(n, j)); }

inline void tally(LemmaTally& t, double value, double bound) {
  ++t.applicable;
  if (value <= bound) ++t.held;
  t.worst = std::max(t.worst, value);
}

}  // namespace detail

/// e^j_{i i^c} = 0 and q_0 q_1 != 0 imply e^j_{i^c i} = 0.
inline LemmaTally check_lemma1(const ProofContext& ctx, const LemmaThresholds& th = {}) {
  LemmaTally t;
  for (const auto& env : ctx.envs) {
    if (env.product()) continue;
    for (unsigned i = 0; i < 2; ++i)
      if (norm(env.e(i, 1 - i)) <= th.zero) detail::tally(t, norm(env.e(1 - i, i)), th.conclusion);
  }
  return t;
}

/// c_I = c_{I_j} = 0 and c_{I_k} != 0 imply e^k_{i_k^c i_k} = 0.
inline LemmaTally check_lemma2(const ProofContext& ctx, const LemmaThresholds& th = {}) {
  LemmaTally t;
  const int n = ctx.n();
  const auto& c = ctx.coeffs;
  for (std::size_t f = 0; f < c.size(); ++f) {
    if (std::abs(c[f]) > th.zero) continue;
    for (int j = 1; j <= n; ++j) {
      if (std::abs(c[detail::flip(f, n, j)]) > th.zero) continue;
      for (int k = 1; k <= n; ++k) {
        if (k == j || std::abs(c[detail::flip(f, n, k)]) <= th.nonzero) continue;
        const unsigned ik = get_bit(f, n, k);
        detail::tally(t, norm(ctx.env(k).e(1 - ik, ik)), th.conclusion);
      }
    }
  }
  return t;
}

/// c_I = c_{I_j} = 0 implies e^k_{i_k^c i_k} = 0 for some k.
inline LemmaTally check_lemma3(const ProofContext& ctx, const LemmaThresholds& th = {}) {
  LemmaTally t;
  const int n = ctx.n();
  const auto& c = ctx.coeffs;
  for (std::size_t f = 0; f < c.size(); ++f) {
    if (std::abs(c[f]) > th.zero) continue;
    for (int j = 1; j <= n; ++j) {
      if (std::abs(c[detail::flip(f, n, j)]) > th.zero) continue;
      double best = INFINITY;
      for (int k = 1; k <= n; ++k) {
        const unsigned ik = get_bit(f, n, k);
        best = std::min(best, norm(ctx.env(k).e(1 - ik, ik)));
      }
      detail::tally(t, best, th.conclusion);
    }
  }
  return t;
}

/// If some I, I' differ in slot j, agree in some slot k, with c_I c_I' != 0
/// and c_I c_I' - c_{I'_j} c_{I_j} != 0, then {e^j_00, e^j_01, e^j_10, e^j_11}
/// spans at most two dimensions. The recorded quantity is the third-largest
/// eigenvalue of the 4x4 Gram matrix.
inline LemmaTally check_lemma4(const ProofContext& ctx, const LemmaThresholds& th = {}) {
  LemmaTally t;
  const int n = ctx.n();
  const auto& c = ctx.coeffs;
  const std::size_t all = (std::size_t{1} << n) - 1;
  for (int j = 1; j <= n; ++j) {
    const std::size_t jbit = std::size_t{1} << bit_position(n, j);
    bool hypothesis = false;
    for (std::size_t f = 0; f < c.size() && !hypothesis; ++f)
      for (std::size_t g = 0; g < c.size() && !hypothesis; ++g) {
        const std::size_t diff = f ^ g;
        // Differ in slot j and agree in at least one slot.
        if (!(diff & jbit) || diff == all) continue;
        const cplx prod = c[f] * c[g];
        const cplx minor = prod - c[g ^ jbit] * c[f ^ jbit];
        hypothesis = std::abs(prod) > th.nonzero && std::abs(minor) > th.nonzero;
      }
    if (!hypothesis) continue;
    const auto& env = ctx.env(j);
    const CVector* v[4] = {&env.e(0, 0), &env.e(0, 1), &env.e(1, 0), &env.e(1, 1)};
    Matrix gram(4, 4);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) gram(a, b) = inner(*v[a], *v[b]);
    detail::tally(t, std::max(hermitian_eig(gram).values[1], 0.0), th.conclusion);
  }
  return t;
}

}  // namespace qmarg
