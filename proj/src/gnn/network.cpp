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

#include "qnas/gnn/network.hpp"

#include <algorithm>
#include <cmath>

#include "qnas/error.hpp"
#include "qnas/gnn/layers.hpp"

namespace qnas::gnn {

using ad::Tensor;
using ad::Var;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string layer_prefix(std::size_t l) { return "layer" + std::to_string(l) + "."; }

template <class T>
std::vector<T> all_of(const auto& arr) {
  return std::vector<T>(arr.begin(), arr.end());
}

// Softmax-weighted sum of candidate outputs; logits is 1 x k.
Var mix(const std::vector<Var>& outs, const Var& logits) {
  auto pi = ad::softmax_rows(logits);
  Var acc;
  for (std::size_t k = 0; k < outs.size(); ++k) {
    auto term = ad::scale_by(outs[k], ad::pick(pi, 0, k));
    acc = acc.defined() ? ad::add(acc, term) : term;
  }
  return acc;
}

bool needs_b(AttentionOp op) { return op != AttentionOp::kSageMean && op != AttentionOp::kGin; }

}  // namespace

LayerCandidates LayerCandidates::full() {
  return {all_of<AttentionOp>(kAllAttention), all_of<Aggregation>(kAllAggregation),
          all_of<Activation>(kAllActivation), all_of<SkipOp>(kAllSkip)};
}

NetworkSpec NetworkSpec::fixed(const ArchSpec& arch, bool batch_norm, Initializer init) {
  arch.validate();
  NetworkSpec s;
  for (const auto& l : arch.layers) {
    s.shapes.push_back({l.hidden, l.heads, l.two_hop});
    s.slots.push_back({{l.attention}, {l.aggregation}, {l.activation}, {l.skip}});
  }
  s.combine = {arch.combine};
  s.batch_norm = batch_norm;
  s.init = init;
  return s;
}

NetworkSpec NetworkSpec::supernet(const std::vector<LayerShape>& shapes, const LayerCandidates& candidates,
                                  std::vector<CombineOp> combine, bool batch_norm, Initializer init) {
  NetworkSpec s;
  s.shapes = shapes;
  s.slots.assign(shapes.size(), candidates);
  s.combine = std::move(combine);
  s.batch_norm = batch_norm;
  s.init = init;
  s.validate();
  return s;
}

void NetworkSpec::validate() const {
  if (shapes.size() < kMinLayers || shapes.size() > kMaxLayers)
    throw InvalidArgument("network needs 2..6 layers, got " + std::to_string(shapes.size()));
  if (slots.size() != shapes.size()) throw InvalidArgument("one candidate set per layer required");
  if (combine.empty()) throw InvalidArgument("combine slot has no candidates");
  bool any_kept = false;
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto& sh = shapes[l];
    const auto& c = slots[l];
    const auto where = "layer " + std::to_string(l) + ": ";
    if (c.attention.empty() || c.aggregation.empty() || c.activation.empty() || c.skip.empty())
      throw InvalidArgument(where + "empty candidate list");
    if (sh.hidden < kMinHidden || sh.hidden > kMaxHidden) throw InvalidArgument(where + "hidden size outside [2, 512]");
    if (std::find(kAllowedHeads.begin(), kAllowedHeads.end(), sh.heads) == kAllowedHeads.end())
      throw InvalidArgument(where + "heads not in {1,2,4,6,8,16,32}");
    bool multihead = std::any_of(c.attention.begin(), c.attention.end(), is_attention_family);
    if (multihead && sh.hidden % sh.heads != 0)
      throw InvalidArgument(where + "hidden size " + std::to_string(sh.hidden) + " not divisible by " +
                            std::to_string(sh.heads) + " heads");
    any_kept = any_kept || std::any_of(c.skip.begin(), c.skip.end(), [](SkipOp s) { return s != SkipOp::kZero; });
  }
  if (!any_kept) throw InvalidArgument("every skip is ZERO: no layer output survives to the combine step");
}

bool NetworkSpec::needs_two_hop() const {
  return std::any_of(shapes.begin(), shapes.end(), [](const LayerShape& s) { return s.two_hop; });
}

bool NetworkSpec::is_fixed() const {
  for (const auto& c : slots)
    if (c.attention.size() != 1 || c.aggregation.size() != 1 || c.activation.size() != 1 || c.skip.size() != 1)
      return false;
  return combine.size() == 1;
}

double init_bound(Initializer init, std::size_t fan_in, std::size_t fan_out) {
  const auto fi = static_cast<double>(fan_in), fo = static_cast<double>(fan_out);
  switch (init) {
    case Initializer::kXavier: return std::sqrt(6.0 / (fi + fo));
    case Initializer::kKaiming: return std::sqrt(6.0 / fi);
    case Initializer::kUniform: return 1.0 / std::sqrt(fi);
  }
  return 0.0;
}

Tensor init_tensor(Initializer init, std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> u(-init_bound(init, rows, cols), init_bound(init, rows, cols));
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
  return t;
}

std::size_t argmax_first(const Tensor& row) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k)
    if (row[k] > row[best]) best = k;
  return best;
}

Var& Network::make(const std::string& name, std::size_t rows, std::size_t cols, bool zero) {
  if (zero) return weights_.add(name, Tensor(rows, cols));
  auto rng = make_rng(derive_seed(seed_, fnv1a(name)));
  return weights_.add(name, init_tensor(spec_.init, rows, cols, rng));
}

bool Network::layer_retained(std::size_t layer) const {
  const auto& s = spec_.slots[layer].skip;
  return std::any_of(s.begin(), s.end(), [](SkipOp op) { return op != SkipOp::kZero; });
}

const Var* Network::maybe(const std::string& name) const {
  return weights_.contains(name) ? &weights_.get(name) : nullptr;
}

Network::Network(NetworkSpec spec, std::size_t concat_slots, std::uint64_t seed)
    : spec_(std::move(spec)), concat_slots_(std::max<std::size_t>(1, std::min(concat_slots, kMaxSequence))),
      seed_(seed) {
  spec_.validate();
  std::vector<std::size_t> widths{spec_.input_dim()};
  for (std::size_t l = 0; l < spec_.shapes.size(); ++l) {
    const auto pre = layer_prefix(l);
    const std::size_t din = widths.back(), d = spec_.shapes[l].hidden;
    const auto& c = spec_.slots[l];
    for (auto op : c.attention) {
      const auto p = pre + "att." + name(op) + ".";
      make(p + "W", din, d);
      if (needs_b(op)) make(p + "B", din, d);
      switch (op) {
        case AttentionOp::kGat:
        case AttentionOp::kGatSym:
        case AttentionOp::kGatLinear:
          make(p + "a_l", 1, d);
          make(p + "a_r", 1, d);
          break;
        case AttentionOp::kGatGenLinear:
          make(p + "w_g", 1, d);
          break;
        case AttentionOp::kSageMax:
          make(p + "P", d, d);
          make(p + "b_p", 1, d, true);
          break;
        case AttentionOp::kGin:
          make(p + "eps", 1, 1, true);
          break;
        default:
          break;
      }
    }
    for (auto op : c.aggregation) {
      const auto p = pre + "agg." + name(op) + ".";
      if (op == Aggregation::kConcat) make(p + "W", concat_slots_ * d, d);
      if (op == Aggregation::kRnn || op == Aggregation::kLstm) {
        const std::size_t g = op == Aggregation::kRnn ? d : 4 * d;
        make(p + "wx", d, g);
        make(p + "wh", d, g);
        make(p + "b", 1, g, true);
      }
    }
    make(pre + "bias", 1, d, true);
    widths.push_back(d);
    for (auto op : c.skip) {
      const auto p = pre + "skip." + name(op) + ".";
      if (op == SkipOp::kSkipSum && widths[l] != d) make(p + "proj", widths[l], d);
      if (op == SkipOp::kSkipCat) make(p + "proj", widths[l] + d, d);
      if (op == SkipOp::kStack) {
        std::size_t total = 0;
        for (auto w : widths) total += w;
        make(p + "proj", total, d);
      }
    }
  }
  const std::size_t last = spec_.shapes.back().hidden;
  for (auto op : spec_.combine) {
    const auto p = "combine." + name(op) + ".";
    std::size_t width = op == CombineOp::kAvg ? last : 0;
    for (std::size_t l = 0; l < spec_.shapes.size(); ++l) {
      if (!layer_retained(l)) continue;
      if (op == CombineOp::kConcat) width += spec_.shapes[l].hidden;
      if (op == CombineOp::kAvg && spec_.shapes[l].hidden != last)
        make(p + "proj" + std::to_string(l), spec_.shapes[l].hidden, last);
    }
    make(p + "head.W", width, 1);
    make(p + "head.b", 1, 1, true);
  }

  auto logits = [&](const std::string& name, std::size_t k) {
    auto rng = make_rng(derive_seed(seed_, fnv1a(name)));
    std::normal_distribution<double> nd(0.0, 1e-3);
    Tensor t(1, k);
    if (k > 1)
      for (std::size_t i = 0; i < k; ++i) t[i] = nd(rng);
    arch_.add(name, std::move(t));
  };
  for (std::size_t l = 0; l < spec_.shapes.size(); ++l) {
    const auto p = "alpha.layer" + std::to_string(l) + ".";
    logits(p + "attention", spec_.slots[l].attention.size());
    logits(p + "aggregation", spec_.slots[l].aggregation.size());
    logits(p + "activation", spec_.slots[l].activation.size());
    logits(p + "skip", spec_.slots[l].skip.size());
  }
  logits("alpha.combine", spec_.combine.size());
}

Var& Network::add_embedding(std::size_t num_nodes) {
  if (has_embedding()) throw InvalidArgument("embedding table already present");
  auto rng = make_rng(derive_seed(seed_, fnv1a("embedding")));
  // Square fan (d, d) so the scale does not shrink with the node count.
  const double bound = init_bound(spec_.init, spec_.input_dim(), spec_.input_dim());
  std::uniform_real_distribution<double> u(-bound, bound);
  Tensor e(num_nodes, spec_.input_dim());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = u(rng);
  return weights_.add("embedding", std::move(e));
}

Network::Message Network::attention_candidate(std::size_t layer, AttentionOp op, const Var& h,
                                              const Neighborhood& nb) const {
  const auto p = layer_prefix(layer) + "att." + name(op) + ".";
  const auto& csr = nb.csr;
  auto z = ad::matmul(h, weights_.get(p + "W"));
  Message out;
  if (needs_b(op)) out.self = ad::matmul(h, weights_.get(p + "B"));
  switch (op) {
    case AttentionOp::kSageMax: {
      auto t = ad::relu(ad::add_row(ad::matmul(z, weights_.get(p + "P")), weights_.get(p + "b_p")));
      out.messages = ad::mul_col(ad::gather_src(t, csr), nb.weight);
      return out;
    }
    case AttentionOp::kGin:
      out.messages = ad::mul_col(ad::gather_src(z, csr), nb.weight);
      out.self = ad::add(z, ad::scale_by(z, weights_.get(p + "eps")));
      return out;
    case AttentionOp::kSageMean:
      out.messages = ad::mul_col(ad::gather_src(z, csr), nb.sage_coef);
      out.self = ad::mul_col(z, nb.self_sage);
      return out;
    default:
      break;
  }
  AttentionParams ap;
  if (auto* v = maybe(p + "a_l")) ap.a_l = *v;
  if (auto* v = maybe(p + "a_r")) ap.a_r = *v;
  if (auto* v = maybe(p + "w_g")) ap.w_g = *v;
  const std::size_t heads = is_attention_family(op) ? spec_.shapes[layer].heads : 1;
  auto coef = attention_coefficients(op, z, nb, heads, ap);
  auto gz = ad::gather_src(z, csr);
  out.messages = coef.cols() == 1 ? ad::mul_col(gz, coef) : ad::mul(ad::head_expand(coef, z.cols()), gz);
  return out;
}

Var Network::aggregation_candidate(std::size_t layer, Aggregation op, const Var& messages,
                                   const Neighborhood& nb) const {
  const auto p = layer_prefix(layer) + "agg." + name(op) + ".";
  Var cw;
  RecurrentParams rp;
  if (op == Aggregation::kConcat) cw = weights_.get(p + "W");
  if (op == Aggregation::kRnn || op == Aggregation::kLstm) {
    rp.wx = weights_.get(p + "wx");
    rp.wh = weights_.get(p + "wh");
    rp.b = weights_.get(p + "b");
  }
  return aggregate(op, messages, nb, cw, rp);
}

Var Network::skip_candidate(std::size_t layer, SkipOp op, const std::vector<Var>& states) const {
  const auto* proj = maybe(layer_prefix(layer) + "skip." + name(op) + ".proj");
  return apply_skip(op, states, proj ? *proj : Var());
}

Var Network::combine_candidate(CombineOp op, const std::vector<Var>& retained,
                               const std::vector<std::size_t>& retained_layers) const {
  const auto p = "combine." + name(op) + ".";
  std::vector<Var> projections;
  if (op == CombineOp::kAvg)
    for (auto l : retained_layers) {
      const auto* v = maybe(p + "proj" + std::to_string(l));
      projections.push_back(v ? *v : Var());
    }
  auto emb = combine(op, retained, projections);
  return ad::add_row(ad::matmul(emb, weights_.get(p + "head.W")), weights_.get(p + "head.b"));
}

Var Network::forward(const GraphContext& ctx, ForwardMode mode) const {
  if (!has_embedding()) throw InvalidArgument("network has no embedding table; pass input features");
  return forward(ctx, embedding(), mode);
}

Var Network::forward(const GraphContext& ctx, const Var& input, ForwardMode mode) const {
  if (input.rows() != ctx.num_nodes || input.cols() != spec_.input_dim())
    throw ShapeError("input " + input.value().shape_str() + " does not match " + std::to_string(ctx.num_nodes) +
                     " nodes x " + std::to_string(spec_.input_dim()) + " features");
  const bool mixture = mode == ForwardMode::kMixture;
  // Runs `eval` on each candidate (or only the argmax one) and mixes.
  auto slot = [&](const std::string& logits_name, std::size_t k, auto&& eval) -> Var {
    const auto& logits = arch_.get(logits_name);
    if (!mixture) return eval(argmax_first(logits.value()));
    std::vector<Var> outs;
    for (std::size_t i = 0; i < k; ++i) outs.push_back(eval(i));
    return mix(outs, logits);
  };

  std::vector<Var> states{input};
  std::vector<Var> retained;
  std::vector<std::size_t> retained_layers;
  Var h = input;
  for (std::size_t l = 0; l < spec_.shapes.size(); ++l) {
    const auto& c = spec_.slots[l];
    const auto& nb = ctx.hood(spec_.shapes[l].two_hop);
    const auto ap = "alpha.layer" + std::to_string(l) + ".";

    // Messages and self terms are mixed with the same attention weights.
    Var messages, self;
    if (!mixture) {
      auto m = attention_candidate(l, c.attention[argmax_first(arch_.get(ap + "attention").value())], h, nb);
      messages = m.messages;
      self = m.self;
    } else {
      std::vector<Var> ms, ss;
      for (auto op : c.attention) {
        auto m = attention_candidate(l, op, h, nb);
        ms.push_back(m.messages);
        ss.push_back(m.self);
      }
      messages = mix(ms, arch_.get(ap + "attention"));
      self = mix(ss, arch_.get(ap + "attention"));
    }

    auto agg = slot(ap + "aggregation", c.aggregation.size(),
                    [&](std::size_t i) { return aggregation_candidate(l, c.aggregation[i], messages, nb); });
    auto pre = ad::add_row(ad::add(agg, self), weights_.get(layer_prefix(l) + "bias"));
    if (spec_.batch_norm) pre = ad::batch_norm(pre);
    h = slot(ap + "activation", c.activation.size(), [&](std::size_t i) { return ad::activate(c.activation[i], pre); });
    states.push_back(h);

    if (layer_retained(l)) {
      retained.push_back(slot(ap + "skip", c.skip.size(), [&](std::size_t i) { return skip_candidate(l, c.skip[i], states); }));
      retained_layers.push_back(l);
    }
  }
  auto logits = slot("alpha.combine", spec_.combine.size(),
                     [&](std::size_t i) { return combine_candidate(spec_.combine[i], retained, retained_layers); });
  return ad::sigmoid(logits);
}

ArchSpec Network::derive() const {
  ArchSpec a;
  for (std::size_t l = 0; l < spec_.shapes.size(); ++l) {
    const auto& c = spec_.slots[l];
    const auto& sh = spec_.shapes[l];
    const auto p = "alpha.layer" + std::to_string(l) + ".";
    LayerSpec ls;
    ls.attention = c.attention[argmax_first(arch_.get(p + "attention").value())];
    ls.aggregation = c.aggregation[argmax_first(arch_.get(p + "aggregation").value())];
    ls.activation = c.activation[argmax_first(arch_.get(p + "activation").value())];
    ls.skip = c.skip[argmax_first(arch_.get(p + "skip").value())];
    ls.hidden = sh.hidden;
    ls.heads = sh.heads;
    ls.two_hop = sh.two_hop;
    a.layers.push_back(ls);
  }
  a.combine = spec_.combine[argmax_first(arch_.get("alpha.combine").value())];
  bool any = std::any_of(a.layers.begin(), a.layers.end(), [](const LayerSpec& l) { return l.skip != SkipOp::kZero; });
  if (!any) {
    const auto l = spec_.shapes.size() - 1;
    const auto& row = arch_.get("alpha.layer" + std::to_string(l) + ".skip").value();
    const auto& cands = spec_.slots[l].skip;
    std::size_t best = cands.size();
    for (std::size_t k = 0; k < cands.size(); ++k)
      if (cands[k] != SkipOp::kZero && (best == cands.size() || row[k] > row[best])) best = k;
    a.layers[l].skip = cands[best];
  }
  return a;
}

}  // namespace qnas::gnn
