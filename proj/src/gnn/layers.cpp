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

#include "qnas/gnn/layers.hpp"

#include "qnas/error.hpp"

namespace qnas::gnn {

using ad::Var;

namespace {

constexpr double kCosEps = 1e-12;

Var per_head_dot(const Var& z, const Var& a, std::size_t heads) { return ad::head_sum(ad::mul_row(z, a), heads); }

Var need(const Var& v, AttentionOp op, const char* what) {
  if (!v.defined()) throw InvalidArgument(name(op) + " needs parameter " + what);
  return v;
}

}  // namespace

Var attention_scores(AttentionOp op, const Var& z, const Neighborhood& nb, std::size_t heads,
                     const AttentionParams& p) {
  const auto& csr = nb.csr;
  if (is_attention_family(op) && (heads == 0 || z.cols() % heads != 0))
    throw ShapeError("width " + std::to_string(z.cols()) + " not divisible by " + std::to_string(heads) + " heads");
  switch (op) {
    case AttentionOp::kConst:
    case AttentionOp::kSageMax:
    case AttentionOp::kGin:
      return nb.ones;
    case AttentionOp::kGcn:
      return nb.inv_size;
    case AttentionOp::kSageMean:
      return nb.inv_size1;
    case AttentionOp::kGat: {
      auto sl = per_head_dot(z, need(p.a_l, op, "a_l"), heads);
      auto sr = per_head_dot(z, need(p.a_r, op, "a_r"), heads);
      return ad::leaky_relu(ad::add(ad::gather_dst(sl, csr), ad::gather_src(sr, csr)));
    }
    case AttentionOp::kGatSym: {
      auto sl = per_head_dot(z, need(p.a_l, op, "a_l"), heads);
      auto sr = per_head_dot(z, need(p.a_r, op, "a_r"), heads);
      auto vu = ad::leaky_relu(ad::add(ad::gather_dst(sl, csr), ad::gather_src(sr, csr)));
      auto uv = ad::leaky_relu(ad::add(ad::gather_src(sl, csr), ad::gather_dst(sr, csr)));
      return ad::add(vu, uv);
    }
    case AttentionOp::kGatCos: {
      auto sq = ad::head_sum(ad::square(z), heads);
      auto dot = ad::head_sum(ad::mul(ad::gather_dst(z, csr), ad::gather_src(z, csr)), heads);
      auto norms = ad::sqrt(ad::add_scalar(ad::mul(ad::gather_dst(sq, csr), ad::gather_src(sq, csr)), kCosEps));
      return ad::div(dot, norms);
    }
    case AttentionOp::kGatLinear: {
      auto sl = per_head_dot(z, need(p.a_l, op, "a_l"), heads);
      auto sr = per_head_dot(z, need(p.a_r, op, "a_r"), heads);
      return ad::tanh(ad::add(ad::gather_dst(sl, csr), ad::gather_src(sr, csr)));
    }
    case AttentionOp::kGatGenLinear: {
      auto t = ad::tanh(ad::add(ad::gather_dst(z, csr), ad::gather_src(z, csr)));
      return per_head_dot(t, need(p.w_g, op, "w_g"), heads);
    }
  }
  throw InvalidArgument("unknown attention op");
}

Var attention_coefficients(AttentionOp op, const Var& z, const Neighborhood& nb, std::size_t heads,
                           const AttentionParams& p) {
  switch (op) {
    case AttentionOp::kConst:
    case AttentionOp::kSageMax:
    case AttentionOp::kGin:
      return nb.weight;
    case AttentionOp::kGcn:
      return nb.gcn_coef;
    case AttentionOp::kSageMean:
      return nb.sage_coef;
    default:
      return ad::mul_col(ad::segment_softmax(attention_scores(op, z, nb, heads, p), nb.csr), nb.weight);
  }
}

Var aggregate(Aggregation op, const Var& messages, const Neighborhood& nb, const Var& concat_w,
              const RecurrentParams& rp) {
  const auto& csr = nb.csr;
  const std::size_t n = csr->num_segments;
  const std::size_t d = messages.cols();
  switch (op) {
    case Aggregation::kSum:
      return ad::segment_sum(messages, csr);
    case Aggregation::kMax:
      return ad::segment_max(messages, csr);
    case Aggregation::kMean:
      return ad::segment_mean(messages, csr);
    case Aggregation::kConcat: {
      if (!concat_w.defined() || concat_w.rows() % d != 0)
        throw ShapeError("CONCAT projection must have a multiple of " + std::to_string(d) + " rows");
      return ad::matmul(ad::pad_segments(messages, csr, concat_w.rows() / d), concat_w);
    }
    case Aggregation::kRnn: {
      if (!rp.wx.defined() || !rp.wh.defined() || !rp.b.defined()) throw InvalidArgument("RNN aggregator needs weights");
      Var h = ad::constant(ad::Tensor(n, rp.wh.cols()));
      for (std::size_t t = 0; t < nb.sequence_len; ++t) {
        auto x = ad::segment_position(messages, csr, t);
        auto next = ad::tanh(ad::add_row(ad::add(ad::matmul(x, rp.wx), ad::matmul(h, rp.wh)), rp.b));
        // Nodes whose neighborhood is already exhausted keep their state.
        h = ad::add(h, ad::mul_col(ad::sub(next, h), nb.step_mask[t]));
      }
      return h;
    }
    case Aggregation::kLstm: {
      if (!rp.wx.defined() || !rp.wh.defined() || !rp.b.defined()) throw InvalidArgument("LSTM aggregator needs weights");
      const std::size_t hd = rp.wh.rows();
      if (rp.wx.cols() != 4 * hd || rp.wh.cols() != 4 * hd)
        throw ShapeError("LSTM weights must be d x 4d, got " + rp.wx.value().shape_str());
      Var h = ad::constant(ad::Tensor(n, hd));
      Var c = ad::constant(ad::Tensor(n, hd));
      for (std::size_t t = 0; t < nb.sequence_len; ++t) {
        auto x = ad::segment_position(messages, csr, t);
        auto g = ad::add_row(ad::add(ad::matmul(x, rp.wx), ad::matmul(h, rp.wh)), rp.b);
        auto i = ad::sigmoid(ad::slice_cols(g, 0, hd));
        auto f = ad::sigmoid(ad::slice_cols(g, hd, 2 * hd));
        auto cc = ad::tanh(ad::slice_cols(g, 2 * hd, 3 * hd));
        auto o = ad::sigmoid(ad::slice_cols(g, 3 * hd, 4 * hd));
        auto c_next = ad::add(ad::mul(f, c), ad::mul(i, cc));
        auto h_next = ad::mul(o, ad::tanh(c_next));
        const auto& m = nb.step_mask[t];
        c = ad::add(c, ad::mul_col(ad::sub(c_next, c), m));
        h = ad::add(h, ad::mul_col(ad::sub(h_next, h), m));
      }
      return h;
    }
  }
  throw InvalidArgument("unknown aggregation");
}

Var apply_skip(SkipOp op, const std::vector<Var>& states, const Var& proj) {
  if (states.size() < 2) throw InvalidArgument("skip needs the current and at least one earlier state");
  const Var& cur = states.back();
  const Var& prev = states[states.size() - 2];
  switch (op) {
    case SkipOp::kIdentity:
      return cur;
    case SkipOp::kZero:
      return ad::constant(ad::Tensor(cur.rows(), cur.cols()));
    case SkipOp::kSkipSum:
      if (prev.cols() == cur.cols()) return ad::add(cur, prev);
      if (!proj.defined()) throw ShapeError("SKIP-SUM across widths " + std::to_string(prev.cols()) + " and " +
                                            std::to_string(cur.cols()) + " needs a projection");
      return ad::add(cur, ad::matmul(prev, proj));
    case SkipOp::kSkipCat:
      if (!proj.defined()) throw InvalidArgument("SKIP-CAT needs a projection");
      return ad::matmul(ad::concat_cols({cur, prev}), proj);
    case SkipOp::kStack:
      if (!proj.defined()) throw InvalidArgument("STACK needs a projection");
      return ad::matmul(ad::concat_cols(states), proj);
  }
  throw InvalidArgument("unknown skip op");
}

Var combine(CombineOp op, const std::vector<Var>& retained, const std::vector<Var>& projections) {
  if (retained.empty()) throw InvalidArgument("no layer output survives the skip selection");
  if (op == CombineOp::kConcat) return retained.size() == 1 ? retained.front() : ad::concat_cols(retained);
  Var acc;
  for (std::size_t i = 0; i < retained.size(); ++i) {
    Var s = i < projections.size() && projections[i].defined() ? ad::matmul(retained[i], projections[i]) : retained[i];
    acc = acc.defined() ? ad::add(acc, s) : s;
  }
  return retained.size() == 1 ? acc : ad::scale(acc, 1.0 / static_cast<double>(retained.size()));
}

}  // namespace qnas::gnn
