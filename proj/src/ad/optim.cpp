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

#include "qnas/ad/optim.hpp"

#include <cmath>

#include "qnas/error.hpp"
#include "qnas/textio.hpp"

namespace qnas::ad {

void OptimizerConfig::validate() const {
  if (!(learning_rate >= kMinLearningRate && learning_rate <= kMaxLearningRate))
    throw InvalidArgument("learning rate " + textio::format_double(learning_rate) + " outside [0.0001, 0.1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw InvalidArgument("Adam betas must lie in [0,1)");
  if (!(eps > 0.0)) throw InvalidArgument("Adam eps must be positive");
  if (!(weight_decay >= 0.0)) throw InvalidArgument("weight decay must be non-negative");
}

Var& ParamStore::add(const std::string& name, Tensor init) {
  if (index_.count(name)) throw InvalidArgument("duplicate parameter name " + name);
  index_[name] = params_.size();
  params_.push_back(parameter(std::move(init), name));
  return params_.back();
}

Var& ParamStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw InvalidArgument("unknown parameter " + name);
  return params_[it->second];
}

const Var& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw InvalidArgument("unknown parameter " + name);
  return params_[it->second];
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value().size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

std::size_t ParamStore::load_matching(const ParamStore& other) {
  std::size_t copied = 0;
  for (auto& p : params_) {
    if (!other.contains(p.name())) continue;
    const auto& src = other.get(p.name()).value();
    if (!src.same_shape(p.value())) continue;
    p.mutable_value() = src;
    ++copied;
  }
  return copied;
}

Optimizer::Optimizer(std::vector<Var> params, OptimizerConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  cfg_.validate();
  for (const auto& p : params_) {
    m_.emplace_back(p.rows(), p.cols());
    v_.emplace_back(p.rows(), p.cols());
  }
}

void Optimizer::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void Optimizer::step() {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const auto& g = params_[k].grad();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!std::isfinite(g[i]))
        throw NumericError("non-finite gradient in parameter '" + params_[k].name() + "'");
  }
  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2, lr = cfg_.learning_rate;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& w = params_[k].mutable_value();
    const Tensor& g = params_[k].grad();
    const bool has_grad = g.size() == w.size();
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = has_grad ? g[i] : 0.0;
      m[i] = b1 * m[i] + (1.0 - b1) * gi;
      v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
      const double update = (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.eps);
      if (cfg_.kind == OptimizerKind::kAdamW) w[i] -= lr * cfg_.weight_decay * w[i];
      w[i] -= lr * update;
    }
  }
}

std::string write_checkpoint(const ParamStore& store) {
  std::string out = "qnas-params " + std::to_string(store.size()) + "\n";
  for (const auto& p : store.all()) {
    const auto& t = p.value();
    out += p.name() + " " + std::to_string(t.rows()) + " " + std::to_string(t.cols()) + "\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out += ' ';
      out += textio::format_double(t[i]);
    }
    out += '\n';
  }
  return out;
}

void read_checkpoint(const std::string& text, ParamStore& store) {
  auto lines = textio::split_lines(text);
  if (lines.empty()) throw ParseError("empty checkpoint", 1);
  auto head = textio::split_ws(lines[0]);
  std::size_t count = 0;
  if (head.size() != 2 || head[0] != "qnas-params" || !textio::parse_int(head[1], count))
    throw ParseError("bad checkpoint header", 1);
  std::size_t li = 1;
  for (std::size_t k = 0; k < count; ++k) {
    if (li >= lines.size()) throw ParseError("truncated checkpoint", li + 1);
    auto h = textio::split_ws(lines[li]);
    std::size_t r = 0, c = 0;
    if (h.size() != 3 || !textio::parse_int(h[1], r) || !textio::parse_int(h[2], c))
      throw ParseError("bad parameter header", li + 1);
    const std::string name(h[0]);
    auto vals = li + 1 < lines.size() ? textio::split_ws(lines[li + 1]) : std::vector<std::string_view>{};
    if (vals.size() != r * c) throw ParseError("expected " + std::to_string(r * c) + " values", li + 2);
    Tensor t(r, c);
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (!textio::parse_double(vals[i], t[i])) throw ParseError("bad value", li + 2);
    auto& p = store.get(name);
    if (!p.value().same_shape(t))
      throw ShapeError("checkpoint shape " + t.shape_str() + " for '" + name + "' vs " + p.value().shape_str());
    p.mutable_value() = std::move(t);
    li += 2;
  }
}

}  // namespace qnas::ad
