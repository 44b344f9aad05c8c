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
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmarg/error.hpp"
#include "qmarg/qstate.hpp"
#include "qmarg/rdm.hpp"
#include "qmarg/schmidt.hpp"
#include "qmarg/tolerances.hpp"

namespace qmarg {

/// a|0...0> + b|1...1> with |a|^2 + |b|^2 = 1 and ab != 0.
struct GhzParams {
  int n = 0;
  cplx a{1.0};
  cplx b{0.0};

  GhzParams() = default;
  GhzParams(int n_, cplx a_, cplx b_) : n(n_), a(a_), b(b_) {
    if (n < 2 || n > kMaxQubits) throw InvalidInput("GhzParams: n must be in 2.." + std::to_string(kMaxQubits));
    const double s = std::norm(a) + std::norm(b);
    if (!(std::abs(s - 1.0) <= tol::kNormalization)) {
      std::ostringstream os;
      os << "GhzParams: normalization violated (|a|^2 + |b|^2 = " << s << ")";
      throw InvalidInput(os.str());
    }
    if (!(std::abs(a) > 1e-10 && std::abs(b) > 1e-10))
      throw InvalidInput("GhzParams: a*b must be nonzero (both magnitudes above 1e-10)");
  }
};

inline PureState make_ghz(const GhzParams& p) {
  CVector amps(dim_of(p.n));
  amps.front() = p.a;
  amps.back() = p.b;
  return PureState(p.n, std::move(amps));
}

inline PureState make_ghz(int n, cplx a, cplx b) { return make_ghz(GhzParams(n, a, b)); }

/// |a|^2 P0 + |b|^2 P1 + z a b* |0...0><1...1| + h.c. Every member shares the
/// (n-1)-qubit marginals of make_ghz(p); |z| = 1 gives pure states.
inline DensityMatrix ghz_family(const GhzParams& p, cplx z) {
  if (!(std::abs(z) <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "ghz_family: |z| = " << std::abs(z) << " exceeds 1 (the member would have a negative eigenvalue)";
    throw InvalidInput(os.str());
  }
  const std::size_t d = dim_of(p.n);
  Matrix m(d, d);
  m(0, 0) = std::norm(p.a);
  m(d - 1, d - 1) = std::norm(p.b);
  m(0, d - 1) = z * p.a * std::conj(p.b);
  m(d - 1, 0) = std::conj(m(0, d - 1));
  return DensityMatrix(std::move(m));
}

enum class GhzStatus { Ghz, NotGhz, Inconclusive };

inline const char* to_string(GhzStatus s) {
  switch (s) {
    case GhzStatus::Ghz: return "ghz";
    case GhzStatus::NotGhz: return "not_ghz";
    case GhzStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// Outcome of detect_ghz_type. When status is Ghz,
///   psi = global_phase * (a (x)_k u_k + b (x)_k v_k)
/// with a = params.a real positive, |a| >= |b|, and b carrying the relative
/// phase. Only |a| and |b| are invariant under local unitaries.
struct GhzCertificate {
  GhzStatus status = GhzStatus::NotGhz;
  std::optional<GhzParams> params;
  std::vector<std::array<CVector, 2>> local_bases;  // (u_k, v_k) for k = 1..n
  cplx global_phase{1.0};
  double residual = INFINITY;

  // Diagnostics.
  std::string branch;           // "product", "nondegenerate", "degenerate"
  std::array<double, 2> q{};    // Schmidt coefficients across qubit 1
  double search_min = NAN;      // degenerate branch: smallest product defect found
  double partner_defect = NAN;  // degenerate branch: product defect of the orthogonal partner
  double factor_overlap = NAN;  // max_k |<u_k|v_k>|
  std::string note;

  bool is_ghz() const noexcept { return status == GhzStatus::Ghz; }
};

namespace detail {

// Sum over qubits of (1 - purity of the single-qubit marginal): zero iff chi is a product vector.
inline double product_defect(std::span<const cplx> chi, int m) {
  double f = 0.0;
  for (int k = 1; k <= m; ++k) {
    const Matrix r = single_qubit_rdm(chi, m, k);
    double purity = 0.0;
    for (const auto& x : r.data()) purity += std::norm(x);
    f += 1.0 - purity;
  }
  return std::max(f, 0.0);
}

inline CVector combine(std::span<const cplx> x, std::span<const cplx> y, cplx cx, cplx cy) {
  CVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = cx * x[i] + cy * y[i];
  return out;
}

// Gauss-Newton on the 2x2 minors of chi(t) = base + t * dir across every cut
// (one qubit versus the rest). The minors are holomorphic in t, so the
// least-squares step is -J^H r / J^H J. Returns the normalized result.
inline CVector polish_product(std::span<const cplx> base, std::span<const cplx> dir, int m) {
  const std::size_t d = base.size();
  cplx t{};
  for (int it = 0; it < 40; ++it) {
    const CVector v = combine(base, dir, 1.0, t);
    cplx num{};
    double den = 0.0;
    for (int k = 1; k <= m; ++k) {
      const std::size_t cols = d / 2;
      for (std::size_t p = 0; p < cols; ++p)
        for (std::size_t q = p + 1; q < cols; ++q) {
          const std::size_t p0 = insert_bit(p, m, k, 0), p1 = insert_bit(p, m, k, 1);
          const std::size_t q0 = insert_bit(q, m, k, 0), q1 = insert_bit(q, m, k, 1);
          const cplx r = v[p0] * v[q1] - v[p1] * v[q0];
          const cplx jac = dir[p0] * v[q1] + v[p0] * dir[q1] - dir[p1] * v[q0] - v[p1] * dir[q0];
          num += std::conj(jac) * r;
          den += std::norm(jac);
        }
    }
    if (!(den > 0.0)) break;
    const cplx step = -num / den;
    t += step;
    // The start is already near a product vector; a long excursion would only
    // slide toward the other end of the span.
    if (std::abs(t) > 0.5) {
      t = 0.0;
      break;
    }
    if (std::abs(step) < 1e-16) break;
  }
  CVector v = combine(base, dir, 1.0, t);
  const double nrm = norm(v);
  for (auto& x : v) x /= nrm;
  return v;
}

// Factor of a product vector at qubit k: top eigenvector of its marginal.
inline CVector product_factor(std::span<const cplx> chi, int m, int k) {
  const auto e = hermitian_eig(single_qubit_rdm(chi, m, k));
  return e.vector(1);
}

inline void finish_certificate(GhzCertificate& c, const PureState& psi, std::vector<CVector> us,
                               std::vector<CVector> vs, double tolerance) {
  const int n = psi.n();
  double overlap = 0.0;
  for (int k = 0; k < n; ++k) {
    canonicalize_phase(us[static_cast<std::size_t>(k)]);
    canonicalize_phase(vs[static_cast<std::size_t>(k)]);
    overlap = std::max(overlap, std::abs(inner(us[static_cast<std::size_t>(k)], vs[static_cast<std::size_t>(k)])));
  }
  c.factor_overlap = overlap;
  CVector pu = product_vector(us), pv = product_vector(vs);
  cplx A = inner(pu, psi.span()), B = inner(pv, psi.span());
  if (std::abs(B) > std::abs(A)) {
    std::swap(us, vs);
    std::swap(pu, pv);
    std::swap(A, B);
  }
  CVector diff(psi.amps());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= A * pu[i] + B * pv[i];
  c.residual = norm(diff);

  const bool accepted = c.residual <= tolerance && overlap <= 1e-9 && std::abs(A) * std::abs(B) > tolerance;
  if (!accepted) {
    if (c.status != GhzStatus::Inconclusive) c.status = GhzStatus::NotGhz;
    if (c.note.empty()) {
      std::ostringstream os;
      os << "best two-product fit leaves residual " << c.residual << " (factor overlap " << overlap << ")";
      c.note = os.str();
    }
    return;
  }
  const double ma = std::abs(A);
  const cplx phase = A / ma;
  c.status = GhzStatus::Ghz;
  c.global_phase = phase;
  // Renormalize against rounding so the parameters pass GhzParams validation.
  const double s = std::sqrt(ma * ma + std::norm(B));
  c.params = GhzParams(n, ma / s, B * std::conj(phase) / s);
  c.local_bases.clear();
  for (int k = 0; k < n; ++k)
    c.local_bases.push_back({us[static_cast<std::size_t>(k)], vs[static_cast<std::size_t>(k)]});
  c.note.clear();
}

}  // namespace detail

/// Decides whether psi is a generalized GHZ state up to local unitaries,
/// i.e. psi = a (x)u_k + b (x)v_k with <u_k|v_k> = 0 for every k and ab != 0.
///
/// Splits off qubit 1. With a Schmidt gap above sqrt(tol) the local bases are
/// read off the single-qubit marginals. Otherwise the 2-dimensional span of
/// the chi vectors is searched for a product vector (grid, compass descent,
/// then Gauss-Newton on the 2x2 minors), and its orthogonal partner must be a
/// product too. A search that lands within sqrt(tol) but cannot be polished
/// below tol is reported as Inconclusive.
inline GhzCertificate detect_ghz_type(const PureState& psi, double tolerance = tol::kVerdict) {
  const int n = psi.n();
  if (n < 2) throw InvalidInput("detect_ghz_type: n >= 2 required");
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw InvalidInput("detect_ghz_type: tolerance must be in (0, 1)");

  GhzCertificate cert;
  const auto split = schmidt_split(psi, 1);
  cert.q = split.q;
  if (split.q[0] * split.q[1] <= tolerance) {
    cert.branch = "product";
    cert.note = "qubit 1 splits off as a product, so ab = 0";
    return cert;
  }

  const double gray = std::sqrt(tolerance);
  std::vector<CVector> us, vs;
  if (split.q[0] - split.q[1] > gray) {
    cert.branch = "nondegenerate";
    for (int k = 1; k <= n; ++k) {
      const auto e = hermitian_eig(single_qubit_rdm(psi.span(), n, k));
      us.push_back(e.vector(1));
      vs.push_back(e.vector(0));
    }
    detail::finish_certificate(cert, psi, std::move(us), std::move(vs), tolerance);
    return cert;
  }

  cert.branch = "degenerate";
  const int m = n - 1;
  CVector chi_a, chi_b;
  if (m == 1) {
    chi_a = split.chi[0];
    chi_b = split.chi[1];
    cert.search_min = cert.partner_defect = 0.0;
  } else {
    auto point = [&](double theta, double phi) {
      return detail::combine(split.chi[0], split.chi[1], std::cos(theta / 2), std::polar(std::sin(theta / 2), phi));
    };
    constexpr int kGrid = 32;
    const double dtheta = std::numbers::pi / (kGrid - 1), dphi = 2 * std::numbers::pi / kGrid;
    double best = INFINITY, bt = 0.0, bp = 0.0;
    for (int i = 0; i < kGrid; ++i)
      for (int l = 0; l < kGrid; ++l) {
        const double f = detail::product_defect(point(i * dtheta, l * dphi), m);
        if (f < best) {
          best = f;
          bt = i * dtheta;
          bp = l * dphi;
        }
      }
    // Compass descent in the tangent chart around the current point, which
    // has no trouble at the poles of the (theta, phi) grid.
    std::array<cplx, 2> cur{std::cos(bt / 2), std::polar(std::sin(bt / 2), bp)};
    auto at = [&](const std::array<cplx, 2>& x) { return detail::combine(split.chi[0], split.chi[1], x[0], x[1]); };
    double h = std::tan(dtheta / 4);
    for (int step = 0; step < 200; ++step) {
      const std::array<cplx, 2> perp{-std::conj(cur[1]), std::conj(cur[0])};
      bool moved = false;
      for (const cplx t : {cplx(h), cplx(-h), cplx(0, h), cplx(0, -h)}) {
        std::array<cplx, 2> cand{cur[0] + t * perp[0], cur[1] + t * perp[1]};
        const double nrm = std::sqrt(std::norm(cand[0]) + std::norm(cand[1]));
        cand[0] /= nrm;
        cand[1] /= nrm;
        const double f = detail::product_defect(at(cand), m);
        if (f < best) {
          best = f;
          cur = cand;
          moved = true;
          break;
        }
      }
      if (!moved) h /= 2;
    }
    cert.search_min = best;
    if (best > gray) {
      cert.status = GhzStatus::NotGhz;
      std::ostringstream os;
      os << "no product vector in the chi span (smallest defect " << best << ")";
      cert.note = os.str();
      return cert;
    }
    const CVector a0 = at(cur);
    const CVector b0 = at({-std::conj(cur[1]), std::conj(cur[0])});
    chi_a = detail::polish_product(a0, b0, m);
    const CVector b1 = detail::combine(split.chi[0], split.chi[1], -std::conj(inner(split.chi[1], chi_a)),
                                       std::conj(inner(split.chi[0], chi_a)));
    const CVector a1 = detail::combine(split.chi[0], split.chi[1], inner(split.chi[0], chi_a), inner(split.chi[1], chi_a));
    chi_b = detail::polish_product(b1, a1, m);
    const double fa = detail::product_defect(chi_a, m), fb = detail::product_defect(chi_b, m);
    cert.search_min = std::min(best, fa);
    cert.partner_defect = fb;
    if (std::max(fa, fb) > tolerance) {
      cert.status = std::max(fa, fb) <= gray ? GhzStatus::Inconclusive : GhzStatus::NotGhz;
      std::ostringstream os;
      os << "product search reached defect " << fa << " but the orthogonal partner has defect " << fb
         << " (threshold " << tolerance << ")";
      cert.note = os.str();
      return cert;
    }
  }

  CVector u1 = contract_rest(psi.span(), chi_a, n, 1);
  CVector v1 = contract_rest(psi.span(), chi_b, n, 1);
  for (auto* v : {&u1, &v1}) {
    const double nrm = norm(*v);
    for (auto& x : *v) x /= nrm;
  }
  us.push_back(std::move(u1));
  vs.push_back(std::move(v1));
  for (int k = 1; k <= m; ++k) {
    us.push_back(m == 1 ? chi_a : detail::product_factor(chi_a, m, k));
    vs.push_back(m == 1 ? chi_b : detail::product_factor(chi_b, m, k));
  }
  detail::finish_certificate(cert, psi, std::move(us), std::move(vs), tolerance);
  return cert;
}

/// Member z of the GHZ family carried back to psi's frame through the
/// certificate's local bases: |a|^2 |U><U| + |b|^2 |V><V| + z a b* |U><V| + h.c.
/// with U = (x)u_k, V = (x)v_k. z = 1 reproduces psi psi^dagger.
inline DensityMatrix family_member(const GhzCertificate& c, cplx z) {
  if (!c.is_ghz()) throw InvalidInput("family_member: certificate is not GHZ-type");
  if (!(std::abs(z) <= 1.0 + 1e-12)) throw InvalidInput("family_member: |z| must not exceed 1");
  std::vector<CVector> us, vs;
  for (const auto& uv : c.local_bases) {
    us.push_back(uv[0]);
    vs.push_back(uv[1]);
  }
  const CVector U = product_vector(us), V = product_vector(vs);
  const auto& p = *c.params;
  Matrix m = Matrix::outer(U, U) * cplx(std::norm(p.a)) + Matrix::outer(V, V) * cplx(std::norm(p.b));
  const Matrix cross = Matrix::outer(U, V) * (z * p.a * std::conj(p.b));
  m += cross;
  m += cross.adjoint();
  return DensityMatrix(std::move(m));
}

}  // namespace qmarg
