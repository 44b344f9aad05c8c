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
#include <cstdint>
#include <string>
#include <vector>

#include "qmarg/error.hpp"
#include "qmarg/qstate/matrix.hpp"
#include "qmarg/qstate/multi_index.hpp"

namespace qmarg {

enum class Pauli : std::uint8_t { I, X, Y, Z };

/**
 * Tensor product of single-qubit Paulis, letter k acting on qubit k+1.
 *
 * Every word is a signed permutation: W|b> = phase(b) |b xor x_mask> with
 * phase(b) = i^{#Y} (-1)^{popcount(b & z_mask)}, where x_mask marks X/Y
 * letters and z_mask marks Y/Z letters.
 */
class PauliWord {
 public:
  explicit PauliWord(std::vector<Pauli> letters) : letters_(std::move(letters)) {
    if (letters_.empty() || letters_.size() > static_cast<std::size_t>(kMaxQubits))
      throw InvalidInput("PauliWord: length out of range");
    const int n = size();
    for (int j = 1; j <= n; ++j) {
      const Pauli p = letters_[static_cast<std::size_t>(j - 1)];
      const std::size_t bit = std::size_t{1} << bit_position(n, j);
      if (p == Pauli::X || p == Pauli::Y) x_mask_ |= bit;
      if (p == Pauli::Y || p == Pauli::Z) z_mask_ |= bit;
      if (p == Pauli::Y) ++y_count_;
    }
  }

  static PauliWord parse(const std::string& s) {
    std::vector<Pauli> letters;
    for (char c : s) {
      switch (c) {
        case 'I': letters.push_back(Pauli::I); break;
        case 'X': letters.push_back(Pauli::X); break;
        case 'Y': letters.push_back(Pauli::Y); break;
        case 'Z': letters.push_back(Pauli::Z); break;
        default: throw InvalidInput(std::string("PauliWord: bad letter '") + c + "'");
      }
    }
    return PauliWord(std::move(letters));
  }

  int size() const noexcept { return static_cast<int>(letters_.size()); }
  const std::vector<Pauli>& letters() const noexcept { return letters_; }
  std::size_t x_mask() const noexcept { return x_mask_; }
  std::size_t z_mask() const noexcept { return z_mask_; }

  int weight() const noexcept {
    int w = 0;
    for (auto p : letters_) w += p != Pauli::I;
    return w;
  }

  /// Column b holds W|b> = phase(b) |target(b)>.
  std::size_t target(std::size_t b) const noexcept { return b ^ x_mask_; }
  cplx phase(std::size_t b) const noexcept {
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int parity = __builtin_popcountll(static_cast<unsigned long long>(b & z_mask_)) & 1;
    const cplx p = kIPow[y_count_ % 4];
    return parity ? -p : p;
  }

  /// Matrix element <row|W|col>.
  cplx element(std::size_t row, std::size_t col) const noexcept {
    return row == target(col) ? phase(col) : cplx{};
  }

  Matrix matrix() const {
    const std::size_t d = dim_of(size());
    Matrix m(d, d);
    for (std::size_t b = 0; b < d; ++b) m(target(b), b) = phase(b);
    return m;
  }

  std::string to_string() const {
    std::string s;
    for (auto p : letters_) s.push_back("IXYZ"[static_cast<int>(p)]);
    return s;
  }

 private:
  std::vector<Pauli> letters_;
  std::size_t x_mask_ = 0;
  std::size_t z_mask_ = 0;
  int y_count_ = 0;
};

}  // namespace qmarg
