// Copyright 2026 The coalition-attrib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header for the coalition-attrib library.

#pragma once

#include "coalition_attrib/causal_graph.hpp"
#include "coalition_attrib/cli.hpp"
#include "coalition_attrib/coalition.hpp"
#include "coalition_attrib/config.hpp"
#include "coalition_attrib/data.hpp"
#include "coalition_attrib/diagnostics.hpp"
#include "coalition_attrib/engine.hpp"
#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/expectation.hpp"
#include "coalition_attrib/expr.hpp"
#include "coalition_attrib/expr_analysis.hpp"
#include "coalition_attrib/quadrature.hpp"
#include "coalition_attrib/random.hpp"
#include "coalition_attrib/refdist.hpp"
#include "coalition_attrib/report.hpp"
#include "coalition_attrib/schema.hpp"
