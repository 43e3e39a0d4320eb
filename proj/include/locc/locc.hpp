// Copyright 2026 The locc-geometry Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// @file locc.hpp
/// @brief Umbrella header for the analysis library (everything except the CLI and JSON I/O).
#pragma once

#include "locc/operator.hpp"
#include "locc/product.hpp"
#include "locc/povm.hpp"
#include "locc/zonotope.hpp"
#include "locc/path.hpp"
#include "locc/product_path.hpp"
#include "locc/locc_tree.hpp"
#include "locc/ensembles.hpp"
