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

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "qmarg/error.hpp"
#include "qmarg/qstate.hpp"
#include "qmarg/rdm.hpp"

namespace qmarg {

/// (lambda_low, lambda_high) of [[1/2 + z, conj(u)], [u, 1/2 - z]].
inline std::pair<double, double> eigen2(double z, cplx u) {
  const double r = std::hypot(std::abs(u), z);
  return {0.5 - r, 0.5 + r};
}

/// (1 - a)|psi><psi| + a omega. Not PSD outside the legitimate range of a.
inline Matrix mixture_state(const PureState& psi, const DensityMatrix& omega, double a) {
  if (omega.n() != psi.n()) throw InvalidInput("mixture_state: qubit counts differ");
  if (!std::isfinite(a)) throw InvalidInput("mixture_state: a must be finite");
  require_same_rdms(psi.projector_matrix(), omega.matrix(), psi.n(), tol::kRdmEqual, "mixture_state");
  return (1.0 - a) * psi.projector_matrix() + cplx(a) * omega.matrix();
}

/**
 * omega = p |phi1><phi1| + (1 - p) |phi2><phi2|, psi = c1 phi1 + c2 phi2,
 * psi2 = conj(c2) phi1 - conj(c1) phi2.
 *
 * In the basis {psi, psi2} the mixture (1 - a) psi psi^H + a omega reads
 * [[1/2 + z(a), conj(u(a))], [u(a), 1/2 - z(a)]] with
 *   z(a) = 1/2 - a (1 - w),  u(a) = a y,
 *   w = <psi|omega|psi> = p|c1|^2 + (1 - p)|c2|^2,
 *   y = <psi2|omega|psi> = (2p - 1) c1 c2.
 */
struct TwoLevelRestriction {
  CVector phi1;
  CVector phi2;
  double p = 0.0;
  cplx c1;
  cplx c2;
  CVector psi2;
  double w = 0.0;
  cplx y;

  double z(double a) const noexcept { return 0.5 - a * (1.0 - w); }
  cplx u(double a) const noexcept { return a * y; }
  double low(double a) const noexcept { return eigen2(z(a), u(a)).first; }

  Matrix block(double a) const {
    Matrix m(2, 2);
    m(0, 0) = 0.5 + z(a);
    m(0, 1) = std::conj(u(a));
    m(1, 0) = u(a);
    m(1, 1) = 0.5 - z(a);
    return m;
  }
};

namespace detail {

/// Throws unless omega has numeric rank exactly 2; returns its eigendecomposition.
inline EigDecomposition rank_two_eig(const PureState& psi, const DensityMatrix& omega) {
  auto eig = hermitian_eig(omega.matrix());
  std::size_t rank = 0;
  for (double v : eig.values) rank += v > tol::kRank;
  if (rank < 2) throw InvalidInput("pure_partner: omega is pure (numeric rank 1), not mixed");
  if (rank > 2) {
    std::ostringstream os;
    os << "pure_partner: omega has numeric rank " << rank << " (> 2)";
    if (psi.n() < 3) throw InvalidInput(os.str() + "; n = 2 fibers are not limited to rank 2");
    throw TheoremViolation(os.str() + " although it shares the reduced density matrices of a pure state");
  }
  return eig;
}

inline TwoLevelRestriction restrict_to_range(const PureState& psi, const EigDecomposition& eig, bool swap) {
  const std::size_t d = eig.size();
  std::size_t i1 = d - 1, i2 = d - 2;
  if (swap) std::swap(i1, i2);

  TwoLevelRestriction r;
  r.phi1 = eig.vector(i1);
  r.phi2 = eig.vector(i2);
  r.p = eig.values[i1] / (eig.values[i1] + eig.values[i2]);
  r.c1 = inner(r.phi1, psi.amps());
  r.c2 = inner(r.phi2, psi.amps());
  const double in_span = std::norm(r.c1) + std::norm(r.c2);
  if (!(std::abs(in_span - 1.0) <= tol::kReconstruction)) {
    std::ostringstream os;
    os << "pure_partner: psi is not in the range of omega (|c1|^2 + |c2|^2 = " << in_span << ")";
    throw TheoremViolation(os.str());
  }
  r.psi2.resize(d);
  for (std::size_t k = 0; k < d; ++k) r.psi2[k] = std::conj(r.c2) * r.phi1[k] - std::conj(r.c1) * r.phi2[k];
  r.w = r.p * std::norm(r.c1) + (1.0 - r.p) * std::norm(r.c2);
  r.y = (2.0 * r.p - 1.0) * r.c1 * r.c2;
  return r;
}

}  // namespace detail

inline TwoLevelRestriction two_level_restriction(const PureState& psi, const DensityMatrix& omega) {
  if (omega.n() != psi.n()) throw InvalidInput("two_level_restriction: qubit counts differ");
  require_same_rdms(psi.projector_matrix(), omega.matrix(), psi.n(), tol::kRdmEqual, "two_level_restriction");
  return detail::restrict_to_range(psi, detail::rank_two_eig(psi, omega), false);
}

struct PartnerResult {
  PureState state;
  TwoLevelRestriction restriction;
  double a_star = 0.0;
  /// Mixing parameters for which the mixture is PSD: [a_minus, a_star].
  double a_minus = 0.0;
  std::string solver;  // "closed-form" or "bisection"
  double low_at_one = 0.0;
  double low_at_star = 0.0;
  double overlap = 0.0;       // |<psi|psi'>|
  double rdm_distance = 0.0;  // max over qubits
  double mixture_lambda = 0.0;
  double mixture_residual = 0.0;
  bool swapped_eigenvectors = false;
};

namespace detail {

inline constexpr double kDiscriminantFloor = 1e-14;
inline constexpr double kMaxMixing = 1e6;
inline constexpr double kCrossing = 1e-10;

/// Largest root a* of det(block(a)) = a [(1 - w) - a ((1 - w)^2 + |y|^2)].
inline std::pair<double, std::string> crossing(const TwoLevelRestriction& r) {
  const double s = 1.0 - r.w;
  const double k = s * s + std::norm(r.y);
  if (s * s >= kDiscriminantFloor && k > 0.0) return {s / k, "closed-form"};

  double lo = 1.0, hi = 2.0;
  while (r.low(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxMixing) {
      std::ostringstream os;
      os << "pure_partner: no eigenvalue crossing below a = " << kMaxMixing << " (w = " << r.w
         << ", |y| = " << std::abs(r.y) << ")";
      throw NumericalFailure(os.str());
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (r.low(mid) > 0.0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), "bisection"};
}

/// Builds psi' for one eigenvector ordering; returns an empty message on success.
inline std::string try_partner(const PureState& psi, const DensityMatrix& omega, const EigDecomposition& eig,
                               bool swap, std::optional<PartnerResult>& out) {
  const auto r = restrict_to_range(psi, eig, swap);
  const auto [a_star, solver] = crossing(r);

  const auto block = hermitian_eig(r.block(a_star));
  const CVector x = block.vector(1);
  CVector amps(psi.dim());
  for (std::size_t k = 0; k < amps.size(); ++k) amps[k] = x[0] * psi.amps()[k] + x[1] * r.psi2[k];
  const double nrm = norm(amps);
  for (auto& v : amps) v /= nrm;
  canonicalize_phase(amps);
  PureState partner(psi.n(), amps);

  std::ostringstream err;
  const double low_star = r.low(a_star);
  if (!(std::abs(low_star) <= kCrossing)) err << "low eigenvalue at a* is " << low_star << "; ";
  const double low_one = r.low(1.0);
  if (!(low_one > 0.0)) err << "low eigenvalue at a = 1 is " << low_one << "; ";
  if (!(a_star > 1.0)) err << "a* = " << a_star << " is not beyond 1; ";

  const double overlap = std::abs(inner(psi.amps(), partner.amps()));
  if (!(overlap < 1.0 - tol::kVerdict)) err << "partner coincides with psi (overlap " << overlap << "); ";

  const double rdm = rdm_max_distance(ptr_tuple(psi), ptr_tuple(partner));
  if (!(rdm <= tol::kVerdict)) err << "RDM distance " << rdm << "; ";

  // Least-squares lambda for omega ~ lambda P + (1 - lambda) P'.
  const Matrix p = psi.projector_matrix();
  const Matrix pp = partner.projector_matrix();
  const Matrix diff = p - pp;
  const Matrix target = omega.matrix() - pp;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < diff.rows(); ++i)
    for (std::size_t j = 0; j < diff.cols(); ++j) {
      num += (std::conj(diff(i, j)) * target(i, j)).real();
      den += std::norm(diff(i, j));
    }
  const double lambda = num / den;
  const double residual = frobenius_distance(omega.matrix(), cplx(lambda) * p + cplx(1.0 - lambda) * pp);
  if (!(residual <= tol::kVerdict)) err << "mixture closure residual " << residual << "; ";
  if (!(lambda > 0.0 && lambda < 1.0)) err << "mixture weight " << lambda << " outside (0, 1); ";

  const std::string msg = err.str();
  if (!msg.empty()) return msg;
  out = PartnerResult{std::move(partner), r, a_star, 0.0, solver, low_one, low_star, overlap, rdm,
                      lambda, residual, swap};
  return {};
}

}  // namespace detail

/**
 * A pure state psi' != psi with the same reduced density matrices, found by
 * extending the mixture (1 - a) psi psi^H + a omega beyond a = 1 until it
 * becomes rank 1. omega must be a rank-2 state sharing psi's RDMs.
 *
 * The lower end of the legitimate interval is always a = 0: the block
 * determinant is a times a decreasing linear function of a.
 */
inline PartnerResult pure_partner(const PureState& psi, const DensityMatrix& omega) {
  if (omega.n() != psi.n()) throw InvalidInput("pure_partner: qubit counts differ");
  require_same_rdms(psi.projector_matrix(), omega.matrix(), psi.n(), tol::kRdmEqual, "pure_partner");
  const auto eig = detail::rank_two_eig(psi, omega);
  const std::size_t d = eig.size();
  const bool degenerate = eig.values[d - 1] - eig.values[d - 2] < tol::kPurifyRank;

  std::optional<PartnerResult> out;
  std::string msg = detail::try_partner(psi, omega, eig, false, out);
  if (!out && degenerate) {
    const std::string second = detail::try_partner(psi, omega, eig, true, out);
    if (!out) msg += " | swapped: " + second;
  }
  if (!out) throw NumericalFailure("pure_partner: verification failed: " + msg);
  return std::move(*out);
}

}  // namespace qmarg
