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
#include <numeric>
#include <sstream>
#include <vector>

#include "qmarg/error.hpp"
#include "qmarg/qstate/matrix.hpp"
#include "qmarg/tolerances.hpp"

namespace qmarg {

/// Spectrum of a Hermitian matrix: eigenvalues ascending, eigenvectors as the
/// matching columns of `vectors`. Within a degenerate cluster the vectors come
/// out in solver order and are not unique.
struct EigDecomposition {
  std::vector<double> values;
  Matrix vectors;

  std::size_t size() const noexcept { return values.size(); }
  CVector vector(std::size_t k) const { return vectors.column(k); }
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing a(p, q). The unitary is a phase
// diag(1, e^{-i phi}) that makes a(p, q) real, followed by the classical real
// rotation [[c, s], [-s, c]].
inline void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const cplx apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const cplx e = apq / r;
  const cplx ec = std::conj(e);
  const double theta = (aqq - app) / (2.0 * r);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const std::size_t n = a.rows();
  // A <- A G
  for (std::size_t k = 0; k < n; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp - s * ec * akq;
    a(k, q) = s * akp + c * ec * akq;
  }
  // A <- G^H A
  for (std::size_t k = 0; k < n; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - s * e * aqk;
    a(q, k) = s * apk + c * e * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * r;
  a(q, q) = aqq + t * r;
  // V <- V G
  for (std::size_t k = 0; k < n; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = c * vkp - s * ec * vkq;
    v(k, q) = s * vkp + c * ec * vkq;
  }
}

}  // namespace detail

/**
 * Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
 *
 * Sweeps run until the off-diagonal Frobenius norm drops below
 * 1e-13 * max(1, ||m||_F), for at most 100 sweeps. Inputs whose largest
 * entrywise asymmetry |m_ij - conj(m_ji)| exceeds 1e-10 are rejected.
 */
inline EigDecomposition hermitian_eig(const Matrix& m) {
  if (!m.square()) throw InvalidInput("hermitian_eig: matrix is not square");
  const double asym = m.max_asymmetry();
  if (asym > tol::kHermitianInput) {
    std::ostringstream os;
    os << "hermitian_eig: matrix is not Hermitian (max asymmetry " << asym << ")";
    throw InvalidInput(os.str());
  }
  const std::size_t n = m.rows();
  Matrix a = m;
  // Work on the exactly Hermitian part.
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx h = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = h;
      a(j, i) = std::conj(h);
    }
  }
  Matrix v = Matrix::identity(n);
  const double threshold = tol::kEigOffDiagonal * std::max(1.0, m.frobenius_norm());

  constexpr int kMaxSweeps = 100;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
  }
  if (!converged && detail::off_diagonal_norm(a) > threshold)
    throw NumericalFailure("hermitian_eig: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

  EigDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// Number of eigenvalues strictly above `threshold`. Rejects matrices with an
/// eigenvalue below -1e-9.
inline std::size_t numeric_rank(const Matrix& m, double threshold = tol::kRank) {
  if (!(threshold > 0.0)) throw InvalidInput("numeric_rank: threshold must be positive");
  const auto eig = hermitian_eig(m);
  if (!eig.values.empty() && eig.values.front() < -tol::kPsd) {
    std::ostringstream os;
    os << "numeric_rank: matrix is not PSD (smallest eigenvalue " << eig.values.front() << ")";
    throw InvalidInput(os.str());
  }
  return static_cast<std::size_t>(
      std::count_if(eig.values.begin(), eig.values.end(), [&](double x) { return x > threshold; }));
}

/// Rebuilds V diag(values) V^H.
inline Matrix reconstruct(const EigDecomposition& e) {
  const std::size_t n = e.size();
  Matrix m(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = e.vectors(i, k) * e.values[k];
      for (std::size_t j = 0; j < n; ++j) m(i, j) += vik * std::conj(e.vectors(j, k));
    }
  return m;
}

}  // namespace qmarg
