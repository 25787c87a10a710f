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

#include <vector>

#include "qnas/ad/ops.hpp"
#include "qnas/gnn/arch.hpp"
#include "qnas/gnn/context.hpp"

namespace qnas::gnn {

// Learned vectors used by the GAT family; unused ones may be left undefined.
struct AttentionParams {
  ad::Var a_l;  // 1 x d
  ad::Var a_r;  // 1 x d
  ad::Var w_g;  // 1 x d
};

// Per-edge scores before normalization, E x heads (E x 1 for ops without
// heads). z holds the transformed node states W h.
//   CONST 1;  GCN 1/|N(v)|;  SAGE-MEAN 1/(|N(v)|+1);  SAGE-MAX, GIN 1
//   GAT             LeakyReLU(a_l.z_v + a_r.z_u)
//   GAT-SYM         GAT(v,u) + GAT(u,v)
//   GAT-COS         <z_v, z_u> / (|z_v| |z_u|)
//   GAT-LINEAR      tanh(a_l.z_v + a_r.z_u)
//   GAT-GEN-LINEAR  w_g . tanh(z_v + z_u)
// Dot products are taken per head over that head's slice of columns.
ad::Var attention_scores(AttentionOp op, const ad::Var& z, const Neighborhood& nb, std::size_t heads,
                         const AttentionParams& p);

// Scores normalized over N(v) (softmax for the GAT family) and multiplied by
// the edge weight.
ad::Var attention_coefficients(AttentionOp op, const ad::Var& z, const Neighborhood& nb, std::size_t heads,
                               const AttentionParams& p);

// Weights of a recurrent aggregator. RNN: wx, wh are d x d; LSTM: d x 4d
// with gate order (input, forget, cell, output).
struct RecurrentParams {
  ad::Var wx, wh, b;
};

// Reduces E x d messages into n x d. Empty neighborhoods give zero rows.
// CONCAT pads each neighborhood to `concat_w.rows() / d` slots in ascending
// node order and projects with concat_w. RNN / LSTM read neighbors in
// ascending node order and return the final hidden state.
ad::Var aggregate(Aggregation op, const ad::Var& messages, const Neighborhood& nb, const ad::Var& concat_w,
                  const RecurrentParams& rp);

// states = h^0 .. h^l. `proj` maps the concatenated (or mismatched) width
// back to h^l's width and is required for STACK and SKIP-CAT, and for
// SKIP-SUM when widths differ. ZERO returns a zero tensor of h^l's shape.
ad::Var apply_skip(SkipOp op, const std::vector<ad::Var>& states, const ad::Var& proj);

// AVG: mean of the retained states, each multiplied by its projection when
// one is given. CONCAT: column concatenation. Throws when nothing survives.
ad::Var combine(CombineOp op, const std::vector<ad::Var>& retained, const std::vector<ad::Var>& projections);

}  // namespace qnas::gnn
