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


#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>

#include "qmarg/io.hpp"
#include "test_util.hpp"

namespace qmarg {
namespace {

std::string error_of(const std::string& text) {
  try {
    io::parse_state(text);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return "";
}

TEST(StateFile, PureRoundTripIsBitExact) {
  for (int n = 1; n <= 5; ++n)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto psi = haar_random_state(n, seed);
      const auto back = io::parse_state(io::format_state(psi));
      ASSERT_TRUE(back.pure());
      const auto& amps = std::get<PureState>(back.value).amps();
      for (std::size_t i = 0; i < amps.size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(amps[i].real()), std::bit_cast<std::uint64_t>(psi.amps()[i].real()));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(amps[i].imag()), std::bit_cast<std::uint64_t>(psi.amps()[i].imag()));
      }
    }
}

TEST(StateFile, DensityRoundTripIsBitExact) {
  SplitMix64 rng(3);
  for (int n = 1; n <= 3; ++n) {
    // Random mixed state: normalized G G^H.
    const std::size_t d = dim_of(n);
    Matrix g(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) g(i, k) = rng.complex_normal();
    Matrix rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    for (std::size_t i = 0; i < d; ++i) rho(i, i) = rho(i, i).real();
    const DensityMatrix dm(rho);
    const auto back = io::parse_state(io::format_state(dm));
    ASSERT_FALSE(back.pure());
    const auto& m = std::get<DensityMatrix>(back.value).matrix();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) EXPECT_EQ(m(i, k), dm.matrix()(i, k));
  }
}

TEST(StateFile, ExtremeValuesSurvive) {
  CVector v(2);
  v[0] = std::sqrt(1 - 1e-300);
  v[1] = cplx(std::numeric_limits<double>::denorm_min(), 1e-150);
  const PureState psi(1, v);
  const auto back = std::get<PureState>(io::parse_state(io::format_state(psi)).value);
  EXPECT_EQ(back.amps(), psi.amps());
}

TEST(StateFile, FileRoundTripAndDigest) {
  const auto path = std::filesystem::temp_directory_path() / "qmarg_io_test_state.json";
  const auto psi = testing::w_state(3);
  io::write_state(path.string(), psi);
  const auto a = io::read_state(path.string());
  const auto b = io::read_state(path.string());
  EXPECT_EQ(a.digest, b.digest);
  EXPECT_EQ(a.n(), 3);
  EXPECT_EQ(a.kind(), "pure");
  EXPECT_EQ(io::hex_digest(a.digest).size(), 16u);
  std::filesystem::remove(path);
}

TEST(StateFile, SyntaxErrorNamesByteOffset) {
  const std::string bad = "{\"version\": 1, \"kind\": \"pure\", \"n\": 1, \"data\": [[1, 0], [0 0]]}";
  const auto msg = error_of(bad);
  // 1-based offset of the second "0" in "[0 0]".
  EXPECT_NE(msg.find("syntax error at byte 60"), std::string::npos) << msg;
}

TEST(StateFile, StructuralErrorsNamePointer) {
  const std::string head = "{\"version\": 1, \"kind\": \"pure\", \"n\": 2, \"data\": ";
  EXPECT_NE(error_of(head + "[[1,0],[0,0],[0,0]]}").find("/data: expected 4 entries"), std::string::npos);
  EXPECT_NE(error_of(head + "[[1,0],[0,0],[0],[0,0]]}").find("/data/2: expected an [re, im] pair"),
            std::string::npos);
  EXPECT_NE(error_of(head + "[[1,0],[0,0],[0,\"x\"],[0,0]]}").find("/data/2/1: expected a number"),
            std::string::npos);

  const std::string dens = "{\"version\": 1, \"kind\": \"density\", \"n\": 1, \"data\": [[[1,0],[0,0]], [[0,0]]]}";
  EXPECT_NE(error_of(dens).find("/data/1: expected a row of 2"), std::string::npos) << error_of(dens);

  EXPECT_NE(error_of("{\"version\": 2}").find("/version"), std::string::npos);
  EXPECT_NE(error_of("{\"version\": 1, \"kind\": \"mixed\"}").find("/kind"), std::string::npos);
  EXPECT_NE(error_of("{\"version\": 1, \"kind\": \"pure\", \"n\": 0}").find("/n"), std::string::npos);
  EXPECT_NE(error_of("[1, 2]").find("expected a JSON object"), std::string::npos);
  EXPECT_NE(error_of("{\"version\": 1, \"index_order\": \"little endian\"}").find("/index_order"),
            std::string::npos);
}

TEST(StateFile, InvariantViolationsAreNamed) {
  const std::string pure = "{\"version\": 1, \"kind\": \"pure\", \"n\": 1, \"data\": [[1, 0], [1, 0]]}";
  EXPECT_NE(error_of(pure).find("normalization"), std::string::npos);
  const std::string herm = "{\"version\": 1, \"kind\": \"density\", \"n\": 1, \"data\": [[[0.5,0],[0.1,0]],[[0,0],[0.5,0]]]}";
  EXPECT_NE(error_of(herm).find("Hermiticity"), std::string::npos);
  const std::string trace = "{\"version\": 1, \"kind\": \"density\", \"n\": 1, \"data\": [[[0.5,0],[0,0]],[[0,0],[0.6,0]]]}";
  EXPECT_NE(error_of(trace).find("trace"), std::string::npos);
}

TEST(StateFile, MissingFile) {
  EXPECT_THROW(io::read_state("/nonexistent/qmarg/state.json"), InvalidInput);
}

}  // namespace
}  // namespace qmarg
