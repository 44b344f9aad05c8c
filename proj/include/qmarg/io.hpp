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
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "qmarg/error.hpp"
#include "qmarg/qstate.hpp"

namespace qmarg::io {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kIndexOrder = "qubit 1 most significant";

/// A parsed state file: either a pure state or a density matrix.
using StateValue = std::variant<PureState, DensityMatrix>;

struct StateFile {
  StateValue value;
  std::uint64_t digest = 0;  // FNV-1a over the raw file bytes

  bool pure() const noexcept { return std::holds_alternative<PureState>(value); }
  int n() const {
    return pure() ? std::get<PureState>(value).n() : std::get<DensityMatrix>(value).n();
  }
  std::string kind() const { return pure() ? "pure" : "density"; }
};

inline std::uint64_t fnv1a(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex_digest(std::uint64_t d) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << d;
  return os.str();
}

namespace detail {

[[noreturn]] inline void fail_at(const std::string& pointer, const std::string& what) {
  throw InvalidInput("state file: at " + (pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

inline cplx read_pair(const nlohmann::json& j, const std::string& at) {
  if (!j.is_array() || j.size() != 2) fail_at(at, "expected an [re, im] pair");
  for (std::size_t k = 0; k < 2; ++k)
    if (!j[k].is_number()) fail_at(at + "/" + std::to_string(k), "expected a number");
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) fail_at(at, "non-finite value");
  return {re, im};
}

inline nlohmann::json write_pair(cplx c) { return nlohmann::json::array({c.real(), c.imag()}); }

}  // namespace detail

/// Parses a state file. Errors name the byte offset (syntax) or the JSON
/// pointer of the first offending element (structure), or the violated
/// state invariant.
inline StateFile parse_state(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("state file: syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) detail::fail_at("", "expected a JSON object");

  if (!doc.contains("version")) detail::fail_at("/version", "missing");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kFormatVersion)
    detail::fail_at("/version", "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
  if (doc.contains("index_order") && doc["index_order"] != kIndexOrder)
    detail::fail_at("/index_order", std::string("unsupported index order (expected \"") + kIndexOrder + "\")");

  if (!doc.contains("kind") || !doc["kind"].is_string()) detail::fail_at("/kind", "expected \"pure\" or \"density\"");
  const std::string kind = doc["kind"].get<std::string>();
  if (kind != "pure" && kind != "density") detail::fail_at("/kind", "expected \"pure\" or \"density\", got \"" + kind + "\"");

  if (!doc.contains("n") || !doc["n"].is_number_integer()) detail::fail_at("/n", "expected an integer qubit count");
  const auto n = doc["n"].get<std::int64_t>();
  if (n < 1 || n > kMaxQubits) detail::fail_at("/n", "qubit count must be in 1.." + std::to_string(kMaxQubits));
  const std::size_t d = dim_of(static_cast<int>(n));

  if (!doc.contains("data") || !doc["data"].is_array()) detail::fail_at("/data", "expected an array");
  const auto& data = doc["data"];
  if (data.size() != d)
    detail::fail_at("/data", "expected " + std::to_string(d) + " entries for n = " + std::to_string(n) + ", got " +
                                 std::to_string(data.size()));

  StateFile out{PureState(1, CVector{1.0, 0.0}), fnv1a(text)};
  if (kind == "pure") {
    CVector amps(d);
    for (std::size_t i = 0; i < d; ++i) amps[i] = detail::read_pair(data[i], "/data/" + std::to_string(i));
    out.value = PureState(static_cast<int>(n), std::move(amps));
  } else {
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      const std::string row = "/data/" + std::to_string(i);
      if (!data[i].is_array() || data[i].size() != d)
        detail::fail_at(row, "expected a row of " + std::to_string(d) + " [re, im] pairs");
      for (std::size_t k = 0; k < d; ++k) m(i, k) = detail::read_pair(data[i][k], row + "/" + std::to_string(k));
    }
    out.value = DensityMatrix(std::move(m));
  }
  return out;
}

inline StateFile read_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open state file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_state(text);
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

inline nlohmann::json matrix_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(detail::write_pair(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json vector_json(std::span<const cplx> v) {
  auto out = nlohmann::json::array();
  for (const auto& c : v) out.push_back(detail::write_pair(c));
  return out;
}

inline nlohmann::ordered_json state_json(const PureState& psi) {
  return {{"version", kFormatVersion}, {"kind", "pure"}, {"n", psi.n()}, {"index_order", kIndexOrder},
          {"data", vector_json(psi.span())}};
}

inline nlohmann::ordered_json state_json(const DensityMatrix& rho) {
  return {{"version", kFormatVersion}, {"kind", "density"}, {"n", rho.n()}, {"index_order", kIndexOrder},
          {"data", matrix_json(rho.matrix())}};
}

/// One amplitude (pure) or one matrix row (density) per line. Numbers are
/// written in shortest round-trip form, so reading back is bit-exact.
template <class State>
std::string format_state(const State& s) {
  const auto doc = state_json(s);
  std::string out = "{\n";
  for (const auto& [key, value] : doc.items()) {
    if (key == "data") continue;
    out += " " + nlohmann::json(key).dump() + ": " + value.dump() + ",\n";
  }
  out += " \"data\": [\n";
  const auto& data = doc["data"];
  for (std::size_t i = 0; i < data.size(); ++i) out += "  " + data[i].dump() + (i + 1 < data.size() ? ",\n" : "\n");
  out += " ]\n}\n";
  return out;
}

template <class State>
void write_state(const std::string& path, const State& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write state file '" + path + "'");
  out << format_state(s);
  if (!out) throw InvalidInput("failed writing state file '" + path + "'");
}

}  // namespace qmarg::io
