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
#include <vector>

#include "qmarg/qstate/matrix.hpp"

namespace qmarg {

/**
 * Row-by-row (Cholesky-Banachiewicz) factorization test: returns true when
 * the Hermitian matrix whose lower triangle is given by `entry(i, j)` (i >= j)
 * is positive definite. Work stops at the first non-positive pivot, so
 * clearly indefinite inputs are rejected after touching only a few rows.
 */
template <class Entry>
bool cholesky_succeeds(std::size_t dim, Entry&& entry) {
  std::vector<cplx> l(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    cplx* li = l.data() + i * dim;
    for (std::size_t j = 0; j < i; ++j) {
      const cplx* lj = l.data() + j * dim;
      double re = entry(i, j).real();
      double im = entry(i, j).imag();
      for (std::size_t k = 0; k < j; ++k) {
        // li[k] * conj(lj[k])
        re -= li[k].real() * lj[k].real() + li[k].imag() * lj[k].imag();
        im -= li[k].imag() * lj[k].real() - li[k].real() * lj[k].imag();
      }
      const double d = lj[j].real();
      li[j] = cplx(re / d, im / d);
    }
    double diag = entry(i, i).real();
    for (std::size_t k = 0; k < i; ++k) diag -= std::norm(li[k]);
    if (!(diag > 0.0)) return false;
    li[i] = std::sqrt(diag);
  }
  return true;
}

/// True when every eigenvalue of the Hermitian matrix m is >= -slack.
inline bool psd_within(const Matrix& m, double slack) {
  return cholesky_succeeds(m.rows(), [&](std::size_t i, std::size_t j) {
    return i == j ? m(i, j) + slack : m(i, j);
  });
}

}  // namespace qmarg
