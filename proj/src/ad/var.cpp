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

#include "qnas/ad/var.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_set>

#include "qnas/ad/csr.hpp"
#include "qnas/error.hpp"

namespace qnas::ad {

namespace {

std::uint64_t next_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

}  // namespace

Tensor& Node::grad_buffer() {
  if (grad.size() != value.size() || !grad.same_shape(value)) grad = Tensor(value.rows(), value.cols());
  return grad;
}

void Var::zero_grad() {
  if (node_->grad.size()) node_->grad.fill(0.0);
}

double Var::item() const {
  if (value().size() != 1) throw ShapeError("item() on a " + value().shape_str() + " tensor");
  return value()[0];
}

Var constant(Tensor value) {
  auto node = std::make_shared<Node>();
  node->id = next_id();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var parameter(Tensor value, std::string name) {
  auto node = std::make_shared<Node>();
  node->id = next_id();
  node->value = std::move(value);
  node->requires_grad = true;
  node->name = std::move(name);
  return Var(std::move(node));
}

Var record(Tensor value, std::vector<Var> parents, BackwardFn fn) {
  auto node = std::make_shared<Node>();
  node->id = next_id();
  node->value = std::move(value);
  node->is_leaf = false;
  bool any = false;
  for (const auto& p : parents) any = any || p.requires_grad();
  if (any) {
    node->requires_grad = true;
    node->parents.reserve(parents.size());
    for (auto& p : parents) node->parents.push_back(p.node());
    node->backward = std::move(fn);
  }
  return Var(std::move(node));
}

void backward(const Var& loss) {
  if (!loss.defined()) throw InvalidArgument("backward on an undefined variable");
  if (loss.value().rows() != 1 || loss.value().cols() != 1)
    throw ShapeError("backward requires a scalar loss, got " + loss.value().shape_str());
  if (!loss.requires_grad()) return;

  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{loss.node().get()};
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    order.push_back(n);
    for (const auto& p : n->parents)
      if (p->requires_grad) stack.push_back(p.get());
  }
  // Parents are always recorded before their children.
  std::sort(order.begin(), order.end(), [](const Node* a, const Node* b) { return a->id > b->id; });

  loss.node()->grad_buffer()[0] += 1.0;
  std::vector<Tensor*> pgrads;
  for (Node* n : order) {
    if (n->is_leaf || !n->backward || n->grad.size() != n->value.size()) continue;
    pgrads.assign(n->parents.size(), nullptr);
    for (std::size_t i = 0; i < n->parents.size(); ++i)
      if (n->parents[i]->requires_grad) pgrads[i] = &n->parents[i]->grad_buffer();
    n->backward(n->grad, pgrads);
  }
  for (Node* n : order)
    if (!n->is_leaf) n->grad = Tensor();
}

Csr Csr::from_lists(std::size_t num_sources, std::vector<std::vector<std::pair<std::uint32_t, double>>> lists) {
  Csr c;
  c.num_segments = lists.size();
  c.num_sources = num_sources;
  c.offsets.assign(lists.size() + 1, 0);
  for (std::size_t s = 0; s < lists.size(); ++s) {
    auto& l = lists[s];
    std::sort(l.begin(), l.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    c.offsets[s + 1] = c.offsets[s] + l.size();
    c.max_segment = std::max(c.max_segment, l.size());
  }
  c.src.reserve(c.offsets.back());
  c.dst.reserve(c.offsets.back());
  c.weight.reserve(c.offsets.back());
  for (std::size_t s = 0; s < lists.size(); ++s)
    for (const auto& [src, w] : lists[s]) {
      if (src >= num_sources) throw InvalidArgument("csr source out of range");
      c.src.push_back(src);
      c.dst.push_back(static_cast<std::uint32_t>(s));
      c.weight.push_back(w);
    }
  return c;
}

}  // namespace qnas::ad
