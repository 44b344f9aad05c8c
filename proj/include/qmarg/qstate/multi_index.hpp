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

namespace qmarg {

// Index convention used everywhere in the library: qubit 1 is the most
// significant bit of a flat amplitude index, qubit n the least significant.

inline constexpr int kMaxQubits = 16;

/// Bit position (counted from the least significant bit) of qubit j in 1..n.
constexpr int bit_position(int n, int j) noexcept { return n - j; }

inline std::size_t dim_of(int n) { return std::size_t{1} << n; }

inline void require_qubit(int n, int j, const char* where) {
  if (j < 1 || j > n)
    throw InvalidInput(std::string(where) + ": qubit label " + std::to_string(j) + " outside 1.." +
                       std::to_string(n));
}

/// Inserts bit b for qubit j into an (n-1)-qubit index over the other qubits.
constexpr std::size_t insert_bit(std::size_t rest, int n, int j, unsigned b) noexcept {
  const int pos = bit_position(n, j);
  const std::size_t low = rest & ((std::size_t{1} << pos) - 1);
  return ((rest >> pos) << (pos + 1)) | (std::size_t{b} << pos) | low;
}

/// Removes qubit j's bit from an n-qubit index.
constexpr std::size_t remove_bit(std::size_t full, int n, int j) noexcept {
  const int pos = bit_position(n, j);
  const std::size_t low = full & ((std::size_t{1} << pos) - 1);
  return ((full >> (pos + 1)) << pos) | low;
}

constexpr unsigned get_bit(std::size_t full, int n, int j) noexcept {
  return static_cast<unsigned>((full >> bit_position(n, j)) & 1U);
}

/// A multi-index I = (i_1 ... i_n) with each slot in {0, 1}.
class MultiIndex {
 public:
  MultiIndex(int n, std::vector<std::uint8_t> bits) : n_(n), bits_(std::move(bits)) {
    if (n_ < 1 || n_ > kMaxQubits) throw InvalidInput("MultiIndex: qubit count out of range");
    if (bits_.size() != static_cast<std::size_t>(n_)) throw InvalidInput("MultiIndex: wrong number of slots");
    for (auto b : bits_)
      if (b > 1) throw InvalidInput("MultiIndex: slot value must be 0 or 1");
  }

  static MultiIndex from_flat(int n, std::size_t flat) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) bits[static_cast<std::size_t>(j - 1)] = static_cast<std::uint8_t>(get_bit(flat, n, j));
    return MultiIndex(n, std::move(bits));
  }

  int n() const noexcept { return n_; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  /// Slot j in 1..n.
  unsigned operator[](int j) const {
    require_qubit(n_, j, "MultiIndex");
    return bits_[static_cast<std::size_t>(j - 1)];
  }

  std::size_t flat() const noexcept {
    std::size_t f = 0;
    for (auto b : bits_) f = (f << 1) | b;
    return f;
  }

  /// I_j: complement slot j.
  MultiIndex complemented(int j) const {
    require_qubit(n_, j, "MultiIndex::complemented");
    auto bits = bits_;
    bits[static_cast<std::size_t>(j - 1)] ^= 1U;
    return MultiIndex(n_, std::move(bits));
  }

  /// Number of slots in which two indices differ.
  int hamming(const MultiIndex& o) const {
    if (o.n_ != n_) throw InvalidInput("MultiIndex: qubit counts differ");
    int d = 0;
    for (std::size_t k = 0; k < bits_.size(); ++k) d += bits_[k] != o.bits_[k];
    return d;
  }

  std::string to_string() const {
    std::string s;
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  int n_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace qmarg
