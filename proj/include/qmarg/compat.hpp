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

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmarg/error.hpp"
#include "qmarg/ghz.hpp"
#include "qmarg/qstate.hpp"
#include "qmarg/rdm.hpp"
#include "qmarg/tolerances.hpp"

namespace qmarg {

/// All 3^n Pauli words without an identity letter, ordered with qubit 1 as
/// the most significant letter and X < Y < Z. Their real span is exactly the
/// set of Hermitian matrices whose partial trace over any one qubit vanishes.
class FullWeightBasis {
 public:
  static constexpr int kMaxN = 8;

  explicit FullWeightBasis(int n) : n_(n) {
    if (n < 2 || n > kMaxN) throw InvalidInput("fullweight_basis: n must be in 2.." + std::to_string(kMaxN));
    std::size_t count = 1;
    for (int j = 0; j < n; ++j) count *= 3;
    words_.reserve(count);
    for (std::size_t code = 0; code < count; ++code) {
      std::vector<Pauli> letters(static_cast<std::size_t>(n));
      std::size_t c = code;
      for (int j = n - 1; j >= 0; --j) {
        letters[static_cast<std::size_t>(j)] = static_cast<Pauli>(1 + c % 3);
        c /= 3;
      }
      words_.emplace_back(std::move(letters));
    }
    scale_ = 1.0 / std::sqrt(static_cast<double>(dim_of(n)));
    if (n <= 4)
      for (const auto& w : words_)
        for (const auto& part : ptr_parts(w.matrix(), n))
          if (part.frobenius_norm() > 1e-12)
            throw NumericalFailure("fullweight_basis: word " + w.to_string() + " has a nonzero partial trace");
  }

  int n() const noexcept { return n_; }
  std::size_t count() const noexcept { return words_.size(); }
  const std::vector<PauliWord>& words() const noexcept { return words_; }
  const PauliWord& word(std::size_t k) const { return words_.at(k); }
  /// 1/sqrt(2^n): multiplies a word to give it unit Frobenius norm.
  double scale() const noexcept { return scale_; }

  /// m += c * (normalized word k).
  void accumulate(Matrix& m, std::size_t k, double c) const {
    const auto& w = words_[k];
    const double s = c * scale_;
    for (std::size_t b = 0; b < m.rows(); ++b) m(w.target(b), b) += s * w.phase(b);
  }

  /// Real coefficient tr(W_k m) / sqrt(2^n) of a Hermitian m on each normalized word.
  std::vector<double> coefficients(const Matrix& m) const {
    std::vector<double> x(words_.size());
    for (std::size_t k = 0; k < words_.size(); ++k) {
      const auto& w = words_[k];
      cplx s{};
      // tr(W m) = sum_t W[target(t), t] m[t, target(t)].
      for (std::size_t t = 0; t < m.rows(); ++t) s += w.phase(t) * m(t, w.target(t));
      x[k] = s.real() * scale_;
    }
    return x;
  }

 private:
  int n_;
  std::vector<PauliWord> words_;
  double scale_ = 1.0;
};

inline FullWeightBasis fullweight_basis(int n) { return FullWeightBasis(n); }

/// Unit-norm element of the full-weight span: matrix = sum_k coeffs[k] W_k / sqrt(2^n).
struct Direction {
  std::vector<double> coeffs;
  Matrix matrix;

  /// Scales `coeffs` to unit length (a direction carries no magnitude).
  static Direction from_coeffs(const FullWeightBasis& basis, std::vector<double> coeffs) {
    if (coeffs.size() != basis.count()) throw InvalidInput("Direction: wrong number of coefficients");
    double s = 0.0;
    for (double c : coeffs) s += c * c;
    s = std::sqrt(s);
    if (!(s > 0.0)) throw InvalidInput("Direction: zero coefficient vector");
    Direction d;
    d.matrix = Matrix(dim_of(basis.n()), dim_of(basis.n()));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      coeffs[k] /= s;
      if (coeffs[k] != 0.0) basis.accumulate(d.matrix, k, coeffs[k]);
    }
    d.coeffs = std::move(coeffs);
    return d;
  }

  static Direction word(const FullWeightBasis& basis, std::size_t k) {
    std::vector<double> c(basis.count());
    c.at(k) = 1.0;
    return from_coeffs(basis, std::move(c));
  }
};

namespace detail {

// rho + t * m / scale is PSD within the step slack.
inline bool step_feasible(const Matrix& rho, const Matrix& m, double scale, double t) {
  const double c = t / scale;
  return cholesky_succeeds(rho.rows(), [&](std::size_t i, std::size_t j) {
    const cplx v = rho(i, j) + c * m(i, j);
    return i == j ? v + tol::kStepPsd : v;
  });
}

// Largest t in [lo, 2] (lo feasible) along sign * m / scale.
inline double step_edge(const Matrix& rho, const Matrix& m, double scale, double sign, double lo) {
  double hi = 2.0;
  if (step_feasible(rho, m, scale, sign * hi)) return hi;
  for (int it = 0; it < 60 && hi - lo > tol::kBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    (step_feasible(rho, m, scale, sign * mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

/// (t-, t+): the extent of {t : rho + t * d.matrix is PSD within 1e-10},
/// found by bisection on [-2, 2]. Every state on that segment has the same
/// marginals as rho.
inline std::pair<double, double> tmax_along(const DensityMatrix& rho, const Direction& d) {
  if (d.matrix.rows() != rho.dim()) throw InvalidInput("tmax_along: direction and state dimensions differ");
  const Matrix& r = rho.matrix();
  if (!detail::step_feasible(r, d.matrix, 1.0, 0.0)) return {0.0, 0.0};
  return {-detail::step_edge(r, d.matrix, 1.0, -1.0, 0.0), detail::step_edge(r, d.matrix, 1.0, 1.0, 0.0)};
}

struct SearchResult {
  double sup = 0.0;               // max over evaluated directions of max(t+, -t-)
  std::size_t samples = 0;        // directions evaluated
  std::vector<double> best_coeffs;
  std::string best_source = "none";
  std::size_t support_dim = 0;    // dimension of the common support subspace
  std::size_t support_directions = 0;  // RDM-preserving directions found inside it
};

namespace detail {

class StepSearch {
 public:
  StepSearch(const DensityMatrix& rho, const FullWeightBasis& basis, SearchResult& out)
      : rho_(rho.matrix()), basis_(basis), out_(out) {}

  // max(t+, -t-) along m / scale, or a value <= floor when neither side
  // clears floor (then only two PSD tests are spent).
  double value_above(const Matrix& m, double scale, double floor) {
    ++out_.samples;
    const double probe = floor + margin(floor);
    double best = 0.0;
    for (double sign : {1.0, -1.0})
      if (detail::step_feasible(rho_, m, scale, sign * probe))
        best = std::max(best, detail::step_edge(rho_, m, scale, sign, probe));
    return best;
  }

  void offer(const std::vector<double>& x, double v, const char* source) {
    if (v > out_.sup) {
      out_.sup = v;
      double s = 0.0;
      for (double c : x) s += c * c;
      s = std::sqrt(s);
      out_.best_coeffs = x;
      for (auto& c : out_.best_coeffs) c /= s;
      out_.best_source = source;
    }
  }

  // Coordinate ascent over an orthonormal set of coefficient vectors
  // (columns of `axes`, each of length basis.count()). Perturbs one axis at a
  // time by +-step, renormalizes implicitly, keeps the move if the value grows.
  double ascend(std::vector<double>& y, const std::vector<std::vector<double>>& axes, int iterations,
                SplitMix64& rng, const char* source) {
    const std::size_t m = axes.size();
    std::vector<double> x = lift(y, axes);
    Matrix mat = build(x);
    double v = value_above(mat, norm2(y), 0.0);
    offer(x, v, source);
    double step = 0.5;
    bool improved_this_pass = false;
    for (int it = 0; it < iterations; ++it) {
      const std::size_t k = static_cast<std::size_t>(it) % m;
      if (k == 0 && it > 0) {
        if (!improved_this_pass) step *= 0.5;
        improved_this_pass = false;
      }
      const double delta = (rng.next() & 1U) ? step : -step;
      y[k] += delta;
      add_axis(mat, axes[k], delta);
      const double cand = value_above(mat, norm2(y), v);
      if (cand > v + margin(v)) {
        v = cand;
        improved_this_pass = true;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += delta * axes[k][i];
        offer(x, v, source);
      } else {
        y[k] -= delta;
        add_axis(mat, axes[k], -delta);
      }
    }
    return v;
  }

  Matrix build(const std::vector<double>& x) const {
    Matrix m(rho_.rows(), rho_.cols());
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k] != 0.0) basis_.accumulate(m, k, x[k]);
    return m;
  }

 private:
  static double margin(double v) { return std::max(1e-12, 1e-3 * v); }

  static double norm2(const std::vector<double>& y) {
    double s = 0.0;
    for (double c : y) s += c * c;
    return std::sqrt(s);
  }

  static std::vector<double> lift(const std::vector<double>& y, const std::vector<std::vector<double>>& axes) {
    std::vector<double> x(axes.front().size());
    for (std::size_t k = 0; k < axes.size(); ++k)
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[k] * axes[k][i];
    return x;
  }

  void add_axis(Matrix& m, const std::vector<double>& axis, double delta) const {
    for (std::size_t i = 0; i < axis.size(); ++i)
      if (axis[i] != 0.0) basis_.accumulate(m, i, delta * axis[i]);
  }

  const Matrix& rho_;
  const FullWeightBasis& basis_;
  SearchResult& out_;
};

// Orthonormal coefficient vectors spanning the RDM-preserving Hermitian
// perturbations supported inside the common support of the marginals:
// any state with rho's marginals lives in the intersection over j of
// supp(tr_j rho) (x) C^2_j. Empty when that subspace is 1-dimensional or
// larger than kMaxSupport.
inline std::vector<std::vector<double>> support_directions(const Matrix& rho, const FullWeightBasis& basis,
                                                           SearchResult& out) {
  constexpr std::size_t kMaxSupport = 8;
  const int n = basis.n();
  const std::size_t d = rho.rows();
  Matrix total(d, d);
  for (int j = 1; j <= n; ++j) {
    const auto e = hermitian_eig(partial_trace(rho, n, {j}));
    const std::size_t half = e.size();
    Matrix q(half, half);
    for (std::size_t k = 0; k < half; ++k)
      if (e.values[k] > tol::kPurifyRank) q += Matrix::outer(e.vector(k), e.vector(k));
    // Lift q to the full space with the identity on slot j.
    for (std::size_t a = 0; a < half; ++a)
      for (std::size_t b = 0; b < half; ++b) {
        if (q(a, b) == cplx{}) continue;
        for (unsigned bit = 0; bit < 2; ++bit) total(insert_bit(a, n, j, bit), insert_bit(b, n, j, bit)) += q(a, b);
      }
  }
  const auto te = hermitian_eig(total);
  std::vector<CVector> sv;
  for (std::size_t k = 0; k < te.size(); ++k)
    if (te.values[k] >= n - 1e-8) sv.push_back(te.vector(k));
  out.support_dim = sv.size();
  const std::size_t k = sv.size();
  if (k < 2 || k > kMaxSupport) return {};

  // Real parameters of Hermitian k x k blocks: diagonal, then symmetric and
  // antisymmetric off-diagonal pairs. Each maps to B delta B^dagger.
  std::vector<Matrix> lifted;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b)
      for (int part = 0; part < (a == b ? 1 : 2); ++part) {
        const cplx w = part == 0 ? cplx(1.0) : cplx(0.0, 1.0);
        Matrix m = Matrix::outer(sv[a], sv[b]) * w;
        m += m.adjoint();
        if (a == b) m *= 0.5;
        lifted.push_back(std::move(m));
      }
  const std::size_t params = lifted.size();
  // Gram matrix of the constraint map delta -> (tr_1, ..., tr_n).
  std::vector<std::vector<Matrix>> images(params);
  for (std::size_t p = 0; p < params; ++p) images[p] = ptr_parts(lifted[p], n);
  Matrix gram(params, params);
  for (std::size_t p = 0; p < params; ++p)
    for (std::size_t r = p; r < params; ++r) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        const auto& x = images[p][static_cast<std::size_t>(j)].data();
        const auto& y = images[r][static_cast<std::size_t>(j)].data();
        for (std::size_t i = 0; i < x.size(); ++i) s += (std::conj(x[i]) * y[i]).real();
      }
      gram(p, r) = gram(r, p) = s;
    }
  const auto ge = hermitian_eig(gram);
  const double scale = std::max(1.0, ge.values.back());
  std::vector<std::vector<double>> axes;
  for (std::size_t p = 0; p < params; ++p) {
    if (ge.values[p] > 1e-10 * scale) break;
    Matrix delta(d, d);
    for (std::size_t r = 0; r < params; ++r) {
      const double c = ge.vectors(r, p).real();
      if (c != 0.0) delta += lifted[r] * cplx(c);
    }
    auto x = basis.coefficients(delta);
    // Gram-Schmidt against earlier axes.
    for (const auto& a : axes) {
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += a[i] * x[i];
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dot * a[i];
    }
    double s = 0.0;
    for (double c : x) s += c * c;
    s = std::sqrt(s);
    if (s < 1e-8) continue;
    for (auto& c : x) c /= s;
    axes.push_back(std::move(x));
  }
  out.support_directions = axes.size();
  return axes;
}

}  // namespace detail

/// Heuristic maximization of the feasible step max(t+, -t-) over unit
/// directions in the full-weight span. Candidates, in order:
///   1. directions inside the common-support subspace (each axis, then a
///      seeded coordinate ascent within that subspace);
///   2. every normalized basis word;
///   3. `restarts` random unit directions, each refined by 3 * 3^n steps of
///      coordinate ascent.
/// A zero result is a numerical observation, not a proof of determinedness.
inline SearchResult search_max_tmax(const DensityMatrix& rho, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw InvalidInput("search_max_tmax: restarts must be >= 1");
  const FullWeightBasis basis(rho.n());
  SearchResult out;
  detail::StepSearch search(rho, basis, out);
  const std::size_t m = basis.count();

  const auto axes = detail::support_directions(rho.matrix(), basis, out);
  if (!axes.empty()) {
    for (const auto& a : axes) search.offer(a, search.value_above(search.build(a), 1.0, out.sup), "support");
    SplitMix64 rng(derive_seed(seed, 0xC0FFEE));
    std::vector<double> y(axes.size());
    for (auto& c : y) c = rng.normal();
    search.ascend(y, axes, static_cast<int>(40 * axes.size()), rng, "support");
  }

  std::vector<std::vector<double>> unit(m, std::vector<double>(m));
  for (std::size_t k = 0; k < m; ++k) unit[k][k] = 1.0;
  for (std::size_t k = 0; k < m; ++k) {
    Matrix w(rho.dim(), rho.dim());
    basis.accumulate(w, k, 1.0);
    search.offer(unit[k], search.value_above(w, 1.0, out.sup), "basis");
  }

  for (int r = 0; r < restarts; ++r) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<double> y(m);
    for (auto& c : y) c = rng.normal();
    search.ascend(y, unit, static_cast<int>(3 * m), rng, "restart");
  }
  return out;
}

/// A GHZ family carried to psi's frame: every member
/// |a|^2 |U><U| + |b|^2 |V><V| + z a b* |U><V| + h.c., |z| <= 1, shares psi's marginals.
struct WitnessFamily {
  GhzParams params;
  std::vector<std::array<CVector, 2>> local_bases;
  cplx global_phase{1.0};
  std::vector<cplx> checked_z;
  double max_rdm_distance = 0.0;
};

enum class Verdict { Determined, Undetermined, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Determined: return "determined";
    case Verdict::Undetermined: return "undetermined";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct CompatVerdict {
  Verdict verdict = Verdict::Inconclusive;
  GhzCertificate ghz;
  std::optional<WitnessFamily> witness;
  SearchResult search;
  bool anomaly = false;
  std::string anomaly_note;

  bool determined() const noexcept { return verdict == Verdict::Determined; }
  double numeric_sup_tmax() const noexcept { return search.sup; }
  std::size_t samples_used() const noexcept { return search.samples; }
};

struct DeterminednessOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  double tolerance = tol::kVerdict;
};

/// Determined iff psi is not GHZ-type (up to local unitaries). The feasible
/// step search runs regardless as an independent cross-check; disagreement
/// (determined with sup > 1e-4, or undetermined with sup < 1e-6) is flagged.
inline CompatVerdict determinedness(const PureState& psi, const DeterminednessOptions& opt = {}) {
  if (psi.n() < 2) throw InvalidInput("determinedness: n >= 2 required");
  CompatVerdict v;
  v.ghz = detect_ghz_type(psi, opt.tolerance);
  switch (v.ghz.status) {
    case GhzStatus::Ghz: v.verdict = Verdict::Undetermined; break;
    case GhzStatus::NotGhz: v.verdict = Verdict::Determined; break;
    case GhzStatus::Inconclusive: v.verdict = Verdict::Inconclusive; break;
  }

  if (v.ghz.is_ghz()) {
    WitnessFamily w;
    w.params = *v.ghz.params;
    w.local_bases = v.ghz.local_bases;
    w.global_phase = v.ghz.global_phase;
    w.checked_z = {cplx(1.0), cplx(0.0), cplx(-1.0), cplx(0.0, 1.0), cplx(0.5), cplx(-0.3, 0.4), std::polar(1.0, 2.0)};
    const auto ref = ptr_tuple(psi);
    for (const cplx z : w.checked_z)
      w.max_rdm_distance = std::max(w.max_rdm_distance, rdm_max_distance(ptr_tuple(family_member(v.ghz, z)), ref));
    if (w.max_rdm_distance > tol::kRdmEqual) {
      v.anomaly = true;
      std::ostringstream os;
      os << "witness family members differ from psi's marginals by " << w.max_rdm_distance;
      v.anomaly_note = os.str();
    }
    v.witness = std::move(w);
  }

  v.search = search_max_tmax(DensityMatrix::projector(psi), opt.restarts, opt.seed);
  const double sup = v.search.sup;
  std::ostringstream os;
  if (v.verdict == Verdict::Determined && sup > 1e-4) {
    os << "verdict is determined but the search found a feasible step of " << sup;
  } else if (v.verdict == Verdict::Undetermined && sup < 1e-6) {
    os << "verdict is undetermined but the search found no step above " << sup;
  }
  if (!os.str().empty()) {
    v.anomaly = true;
    v.anomaly_note += (v.anomaly_note.empty() ? "" : "; ") + os.str();
  }
  return v;
}

/// Checks that omega, a mixed state sharing psi's marginals, has rank 2.
/// A false return contradicts the rank-2 result and must be treated as a
/// theorem violation by the caller. n = 2 is rejected: there the marginals
/// are single-qubit states and e.g. I/4 shares a Bell pair's marginals.
inline bool rank2_check(const PureState& psi, const DensityMatrix& omega) {
  if (omega.n() != psi.n()) throw InvalidInput("rank2_check: qubit counts differ");
  if (psi.n() < 3) throw InvalidInput("rank2_check: n >= 3 required (the rank-2 result does not hold for n = 2)");
  require_same_rdms(psi.projector_matrix(), omega.matrix(), psi.n(), tol::kRdmEqual, "rank2_check");
  const std::size_t rank = numeric_rank(omega.matrix(), tol::kRank);
  if (rank < 2) throw InvalidInput("rank2_check: omega is pure (numeric rank 1), not mixed");
  return rank == 2;
}

}  // namespace qmarg
