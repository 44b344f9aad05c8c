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

// Tolerance ladder shared by every module. Each rung sits roughly a decade
// above the one below it so that noise from one stage cannot flip the next.
namespace qmarg::tol {

inline constexpr double kEigOffDiagonal = 1e-13;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kHermitianInput = 1e-10;
inline constexpr double kNormalization = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPsd = 1e-9;
inline constexpr double kRank = 1e-8;
inline constexpr double kPurifyRank = 1e-10;
inline constexpr double kReconstruction = 1e-9;
inline constexpr double kRdmEqual = 1e-9;
inline constexpr double kVerdict = 1e-8;
inline constexpr double kProductSplit = 1e-12;

// tmax_along: PSD slack and bisection resolution.
inline constexpr double kStepPsd = 1e-10;
inline constexpr double kBisection = 1e-12;

}  // namespace qmarg::tol
