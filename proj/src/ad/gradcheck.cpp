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

#include "qnas/ad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qnas/rng.hpp"

namespace qnas::ad {

GradCheckResult check_gradients(const std::function<Var()>& f, std::vector<Var> params,
                                const GradCheckOptions& opts) {
  for (auto& p : params) p.zero_grad();
  Var loss = f();
  backward(loss);
  std::vector<Tensor> analytic;
  for (auto& p : params) analytic.push_back(p.has_grad() ? p.grad() : Tensor(p.rows(), p.cols()));

  GradCheckResult res;
  auto rng = make_rng(opts.seed);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& w = params[k].mutable_value();
    std::vector<std::size_t> coords(w.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (coords.size() > opts.max_coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(opts.max_coords_per_param);
    }
    for (auto i : coords) {
      const double orig = w[i];
      w[i] = orig + opts.step;
      const double fp = f().item();
      w[i] = orig - opts.step;
      const double fm = f().item();
      w[i] = orig;
      const double numeric = (fp - fm) / (2.0 * opts.step);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.denom_floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > res.max_rel_error) {
        res.max_rel_error = rel;
        res.worst_param = params[k].name();
      }
      ++res.coordinates_checked;
    }
  }
  for (auto& p : params) p.zero_grad();
  return res;
}

}  // namespace qnas::ad
