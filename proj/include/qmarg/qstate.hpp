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

#include "qmarg/qstate/eig.hpp"
#include "qmarg/qstate/matrix.hpp"
#include "qmarg/qstate/multi_index.hpp"
#include "qmarg/qstate/pauli.hpp"
#include "qmarg/qstate/psd.hpp"
#include "qmarg/qstate/qubit_ops.hpp"
#include "qmarg/qstate/random.hpp"
#include "qmarg/qstate/states.hpp"
