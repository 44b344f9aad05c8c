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
#include <sstream>
#include <string>
#include <utility>

#include "qmarg/error.hpp"
#include "qmarg/qstate/matrix.hpp"
#include "qmarg/qstate/multi_index.hpp"
#include "qmarg/qstate/psd.hpp"
#include "qmarg/tolerances.hpp"

namespace qmarg {

inline int qubits_for_dim(std::size_t dim, const char* where) {
  int n = 0;
  while ((std::size_t{1} << n) < dim && n <= kMaxQubits) ++n;
  if (dim == 0 || (std::size_t{1} << n) != dim || n > kMaxQubits)
    throw InvalidInput(std::string(where) + ": dimension " + std::to_string(dim) + " is not 2^n");
  return n;
}

/// Normalized amplitude vector c_I over all n-bit multi-indices.
class PureState {
 public:
  /// Validates size 2^n and unit norm (within 1e-10); never renormalizes.
  PureState(int n, CVector amps) : n_(n), amps_(std::move(amps)) {
    if (n_ < 1 || n_ > kMaxQubits) throw InvalidInput("PureState: qubit count must be in 1.." + std::to_string(kMaxQubits));
    if (amps_.size() != dim_of(n_))
      throw InvalidInput("PureState: expected " + std::to_string(dim_of(n_)) + " amplitudes, got " +
                         std::to_string(amps_.size()));
    const double nrm = norm(amps_);
    if (!(std::abs(nrm * nrm - 1.0) <= tol::kNormalization)) {
      std::ostringstream os;
      os << "PureState: normalization violated (sum |c_I|^2 = " << nrm * nrm << ")";
      throw InvalidInput(os.str());
    }
  }

  /// Infers n from the vector length.
  explicit PureState(CVector amps) : PureState(qubits_for_dim(amps.size(), "PureState"), amps) {}

  int n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  const CVector& amps() const noexcept { return amps_; }
  std::span<const cplx> span() const noexcept { return amps_; }

  cplx operator[](std::size_t flat) const { return amps_.at(flat); }
  cplx operator[](const MultiIndex& idx) const { return amps_.at(idx.flat()); }

  Matrix projector_matrix() const { return Matrix::outer(amps_, amps_); }

 private:
  int n_;
  CVector amps_;
};

/// Hermitian, unit-trace, PSD matrix on n qubits.
class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12 entrywise), trace (1e-10) and PSD (-1e-9).
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.square()) throw InvalidInput("DensityMatrix: matrix is not square");
    n_ = qubits_for_dim(m_.rows(), "DensityMatrix");
    const double asym = m_.max_asymmetry();
    if (!(asym <= tol::kHermitian)) {
      std::ostringstream os;
      os << "DensityMatrix: Hermiticity violated (max asymmetry " << asym << ")";
      throw InvalidInput(os.str());
    }
    const cplx tr = m_.trace();
    if (!(std::abs(tr - 1.0) <= tol::kTrace)) {
      std::ostringstream os;
      os << "DensityMatrix: unit trace violated (trace " << tr.real() << ")";
      throw InvalidInput(os.str());
    }
    if (!psd_within(m_, tol::kPsd))
      throw InvalidInput("DensityMatrix: positive semidefiniteness violated (eigenvalue below -1e-9)");
  }

  static DensityMatrix projector(const PureState& psi) { return DensityMatrix(psi.projector_matrix()); }

  int n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  cplx operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

 private:
  int n_ = 0;
  Matrix m_;
};

}  // namespace qmarg
