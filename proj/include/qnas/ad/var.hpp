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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qnas/ad/tensor.hpp"

namespace qnas::ad {

// Backward rule of one recorded operation. `parent_grads[i]` is null when the
// i-th input does not require a gradient; otherwise it is a buffer of that
// input's shape into which the rule accumulates.
using BackwardFn = std::function<void(const Tensor& out_grad, std::span<Tensor* const> parent_grads)>;

struct Node {
  std::uint64_t id = 0;  // position in the computation record
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  bool is_leaf = true;
  std::string name;
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward;

  Tensor& grad_buffer();
};

// Handle to a node of the computation record. Cheap to copy.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  bool defined() const noexcept { return static_cast<bool>(node_); }
  const Tensor& value() const { return node_->value; }
  // Only meaningful for leaves: parameters are updated in place.
  Tensor& mutable_value() { return node_->value; }
  const Tensor& grad() const { return node_->grad; }
  Tensor& mutable_grad() { return node_->grad_buffer(); }
  bool has_grad() const { return node_->grad.size() > 0; }
  void zero_grad();

  bool requires_grad() const { return node_->requires_grad; }
  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }
  std::uint64_t tape_id() const { return node_->id; }
  const std::string& name() const { return node_->name; }
  double item() const;

  const std::shared_ptr<Node>& node() const noexcept { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

Var constant(Tensor value);
Var parameter(Tensor value, std::string name = {});

// Records an operation. When no parent requires a gradient the backward rule
// is dropped and the result is a constant.
Var record(Tensor value, std::vector<Var> parents, BackwardFn fn);

// Reverse sweep from a 1x1 loss. Leaf gradients accumulate across calls;
// interior gradients are released after the sweep.
void backward(const Var& loss);

}  // namespace qnas::ad
