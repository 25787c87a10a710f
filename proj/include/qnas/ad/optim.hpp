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

#include <map>
#include <string>
#include <vector>

#include "qnas/ad/var.hpp"

namespace qnas::ad {

enum class OptimizerKind { kAdam, kAdamW };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.01;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  // Throws InvalidArgument when the learning rate leaves [1e-4, 0.1] or the
  // moment coefficients are outside [0, 1).
  void validate() const;
};

inline constexpr double kMinLearningRate = 1e-4;
inline constexpr double kMaxLearningRate = 0.1;

// Named, ordered collection of trainable leaves.
class ParamStore {
 public:
  Var& add(const std::string& name, Tensor init);
  bool contains(const std::string& name) const { return index_.count(name) > 0; }
  Var& get(const std::string& name);
  const Var& get(const std::string& name) const;

  std::vector<Var>& all() noexcept { return params_; }
  const std::vector<Var>& all() const noexcept { return params_; }
  std::size_t size() const noexcept { return params_.size(); }
  std::size_t num_scalars() const;

  void zero_grad();
  // Copies values of every same-named, same-shaped parameter from `other`.
  std::size_t load_matching(const ParamStore& other);

 private:
  std::vector<Var> params_;
  std::map<std::string, std::size_t> index_;
};

// Adam / AdamW with per-parameter first and second moment buffers.
class Optimizer {
 public:
  Optimizer(std::vector<Var> params, OptimizerConfig cfg);

  // Applies one update from the parameters' current gradient buffers.
  // Throws NumericError naming the parameter if a gradient is non-finite.
  void step();
  void zero_grad();

  const OptimizerConfig& config() const noexcept { return cfg_; }
  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }
  std::size_t steps_taken() const noexcept { return t_; }
  const std::vector<Var>& params() const noexcept { return params_; }

 private:
  std::vector<Var> params_;
  OptimizerConfig cfg_;
  std::vector<Tensor> m_, v_;
  std::size_t t_ = 0;
};

// Checkpoint text format:
//   qnas-params <count>
//   <name> <rows> <cols>
//   <rows*cols values, row-major, shortest round-trip form, space separated>
std::string write_checkpoint(const ParamStore& store);
// Loads values into existing same-named parameters; shapes must match.
void read_checkpoint(const std::string& text, ParamStore& store);

}  // namespace qnas::ad
