// Copyright 2026 The qnas Authors. All Rights Reserved.
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

#include <cstdint>
#include <functional>
#include <vector>

#include "qnas/ad/var.hpp"

namespace qnas::ad {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::string worst_param;
};

struct GradCheckOptions {
  double step = 1e-5;
  // Coordinates per parameter; larger tensors are sampled uniformly.
  std::size_t max_coords_per_param = 64;
  std::uint64_t seed = 0;
  // Relative error uses max(|analytic|, |numeric|, floor) as denominator.
  double denom_floor = 1e-6;
};

// Compares reverse-mode gradients of the scalar `f` with central differences.
GradCheckResult check_gradients(const std::function<Var()>& f, std::vector<Var> params,
                                const GradCheckOptions& opts = {});

}  // namespace qnas::ad
