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
#include <sstream>
#include <vector>

#include "qmarg/error.hpp"
#include "qmarg/qstate.hpp"
#include "qmarg/tolerances.hpp"

namespace qmarg {

namespace detail {

inline std::vector<int> checked_subset(int n, std::span<const int> qubits, const char* where) {
  std::vector<int> s(qubits.begin(), qubits.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw InvalidInput(std::string(where) + ": repeated qubit label");
  for (int j : s) require_qubit(n, j, where);
  if (s.empty()) throw InvalidInput(std::string(where) + ": empty qubit subset");
  if (static_cast<int>(s.size()) == n) throw InvalidInput(std::string(where) + ": cannot trace out every qubit");
  return s;
}

}  // namespace detail

/**
 * Partial trace of a Hermitian matrix on n qubits over the given qubit labels
 * (1-based). Direct index summation; the remaining qubits keep their relative
 * order. Works for any Hermitian input, PSD or not.
 */
inline Matrix partial_trace(const Matrix& m, int n, std::span<const int> qubits) {
  if (!m.square() || m.rows() != dim_of(n)) throw InvalidInput("partial_trace: matrix is not 2^n x 2^n");
  const auto traced = detail::checked_subset(n, qubits, "partial_trace");
  const int kept_count = n - static_cast<int>(traced.size());

  std::size_t traced_mask = 0;
  for (int j : traced) traced_mask |= std::size_t{1} << bit_position(n, j);

  // Scatter tables: where each kept index and each traced index land.
  std::vector<std::size_t> kept_pos;
  std::vector<std::size_t> traced_pos;
  for (int j = 1; j <= n; ++j) {
    const std::size_t bit = std::size_t{1} << bit_position(n, j);
    (traced_mask & bit ? traced_pos : kept_pos).push_back(bit);
  }
  auto scatter = [](std::size_t idx, const std::vector<std::size_t>& pos) {
    std::size_t out = 0;
    const std::size_t k = pos.size();
    for (std::size_t b = 0; b < k; ++b)
      if ((idx >> (k - 1 - b)) & 1U) out |= pos[b];
    return out;
  };

  const std::size_t kd = dim_of(kept_count);
  const std::size_t td = dim_of(static_cast<int>(traced.size()));
  std::vector<std::size_t> kept_full(kd), traced_full(td);
  for (std::size_t r = 0; r < kd; ++r) kept_full[r] = scatter(r, kept_pos);
  for (std::size_t t = 0; t < td; ++t) traced_full[t] = scatter(t, traced_pos);

  Matrix out(kd, kd);
  for (std::size_t r = 0; r < kd; ++r)
    for (std::size_t c = 0; c < kd; ++c) {
      cplx s = 0.0;
      for (std::size_t t = 0; t < td; ++t) s += m(kept_full[r] | traced_full[t], kept_full[c] | traced_full[t]);
      out(r, c) = s;
    }
  return out;
}

inline Matrix partial_trace(const Matrix& m, int n, std::initializer_list<int> qubits) {
  return partial_trace(m, n, std::span<const int>(qubits.begin(), qubits.size()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> qubits) {
  return DensityMatrix(partial_trace(rho.matrix(), rho.n(), qubits));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> qubits) {
  return partial_trace(rho, std::span<const int>(qubits.begin(), qubits.size()));
}

/// Single-qubit reduced state of qubit j (trace over every other qubit).
inline Matrix single_qubit_rdm(std::span<const cplx> psi, int n, int j) {
  require_qubit(n, j, "single_qubit_rdm");
  Matrix r(2, 2);
  for (std::size_t rest = 0; rest < dim_of(n - 1); ++rest)
    for (unsigned a = 0; a < 2; ++a)
      for (unsigned b = 0; b < 2; ++b)
        r(a, b) += psi[insert_bit(rest, n, j, a)] * std::conj(psi[insert_bit(rest, n, j, b)]);
  return r;
}

/// The n-tuple of (n-1)-qubit reduced states; part j (0-based j-1) traces out qubit j.
class RdmTuple {
 public:
  RdmTuple(int n, std::vector<DensityMatrix> parts) : n_(n), parts_(std::move(parts)) {
    if (n_ < 2) throw InvalidInput("RdmTuple: n >= 2 required");
    if (parts_.size() != static_cast<std::size_t>(n_)) throw InvalidInput("RdmTuple: need one part per qubit");
    for (const auto& p : parts_)
      if (p.n() != n_ - 1) throw InvalidInput("RdmTuple: every part must act on n-1 qubits");
    const double c = consistency_residual();
    if (!(c <= 1e-10)) {
      std::ostringstream os;
      os << "RdmTuple: pairwise consistency violated (residual " << c << ")";
      throw InvalidInput(os.str());
    }
  }

  int n() const noexcept { return n_; }
  /// Part for qubit label j in 1..n.
  const DensityMatrix& part(int j) const {
    require_qubit(n_, j, "RdmTuple::part");
    return parts_[static_cast<std::size_t>(j - 1)];
  }
  const std::vector<DensityMatrix>& parts() const noexcept { return parts_; }

  /// max over j != k of || tr_k(part j) - tr_j(part k) ||_F, with the labels
  /// shifted to each part's own numbering. At n = 2 this compares traces.
  double consistency_residual() const {
    double worst = 0.0;
    for (int j = 1; j <= n_; ++j)
      for (int k = j + 1; k <= n_; ++k) {
        const auto& pj = parts_[static_cast<std::size_t>(j - 1)];
        const auto& pk = parts_[static_cast<std::size_t>(k - 1)];
        if (n_ == 2) {
          worst = std::max(worst, std::abs(pj.matrix().trace() - pk.matrix().trace()));
          continue;
        }
        // Inside part j, qubit k (> j) has label k-1; inside part k, qubit j keeps label j.
        const Matrix a = partial_trace(pj.matrix(), n_ - 1, {k - 1});
        const Matrix b = partial_trace(pk.matrix(), n_ - 1, {j});
        worst = std::max(worst, frobenius_distance(a, b));
      }
    return worst;
  }

 private:
  int n_;
  std::vector<DensityMatrix> parts_;
};

/// rho -> (tr_1 rho, ..., tr_n rho) for a Hermitian matrix (no PSD check).
inline std::vector<Matrix> ptr_parts(const Matrix& m, int n) {
  if (n < 2) throw InvalidInput("ptr_tuple: n >= 2 required (no (n-1)-qubit parts exist for n = 1)");
  std::vector<Matrix> parts;
  parts.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) parts.push_back(partial_trace(m, n, {j}));
  return parts;
}

inline RdmTuple ptr_tuple(const DensityMatrix& rho) {
  auto raw = ptr_parts(rho.matrix(), rho.n());
  std::vector<DensityMatrix> parts;
  parts.reserve(raw.size());
  for (auto& m : raw) parts.emplace_back(std::move(m));
  return RdmTuple(rho.n(), std::move(parts));
}

inline RdmTuple ptr_tuple(const PureState& psi) { return ptr_tuple(DensityMatrix::projector(psi)); }

/// Largest Frobenius distance between matching parts.
inline double rdm_max_distance(std::span<const Matrix> a, std::span<const Matrix> b) {
  if (a.size() != b.size()) throw InvalidInput("rdm_max_distance: tuples have different qubit counts");
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].rows() != b[j].rows()) throw InvalidInput("rdm_max_distance: part dimensions differ");
    worst = std::max(worst, frobenius_distance(a[j], b[j]));
  }
  return worst;
}

inline double rdm_max_distance(const RdmTuple& a, const RdmTuple& b) {
  if (a.n() != b.n()) throw InvalidInput("rdm_max_distance: tuples have different qubit counts");
  double worst = 0.0;
  for (int j = 1; j <= a.n(); ++j) worst = std::max(worst, frobenius_distance(a.part(j).matrix(), b.part(j).matrix()));
  return worst;
}

/// Per-qubit distances, for diagnostics that name the offending qubit.
inline std::vector<double> rdm_distances(std::span<const Matrix> a, std::span<const Matrix> b) {
  if (a.size() != b.size()) throw InvalidInput("rdm_distances: tuples have different qubit counts");
  std::vector<double> d(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) d[j] = frobenius_distance(a[j], b[j]);
  return d;
}

/// Throws InvalidInput naming the first qubit whose parts differ by more than `tolerance`.
inline void require_same_rdms(const Matrix& a, const Matrix& b, int n, double tolerance, const char* where) {
  const auto pa = ptr_parts(a, n);
  const auto pb = ptr_parts(b, n);
  const auto d = rdm_distances(pa, pb);
  for (std::size_t j = 0; j < d.size(); ++j)
    if (!(d[j] <= tolerance)) {
      std::ostringstream os;
      os << where << ": reduced density matrices differ at qubit " << j + 1 << " (distance " << d[j] << ")";
      throw InvalidInput(os.str());
    }
}

}  // namespace qmarg
