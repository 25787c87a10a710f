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

#include "qnas/ad/csr.hpp"
#include "qnas/ad/var.hpp"

// Differentiable primitives. Shape mismatches throw ShapeError quoting both
// shapes.
namespace qnas::ad {

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);

// Broadcasting forms: row is 1 x c, col is r x 1, s is 1 x 1.
Var add_row(const Var& a, const Var& row);
Var mul_row(const Var& a, const Var& row);
Var mul_col(const Var& a, const Var& col);
Var scale_by(const Var& a, const Var& s);

Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
Var square(const Var& a);
Var sqrt(const Var& a);

enum class Activation { kSigmoid, kTanh, kRelu, kLinear, kLeakyRelu, kElu };
inline constexpr double kLeakyReluSlope = 0.2;
inline constexpr double kEluAlpha = 1.0;

Var sigmoid(const Var& a);
Var tanh(const Var& a);
Var relu(const Var& a);
Var leaky_relu(const Var& a, double slope = kLeakyReluSlope);
Var elu(const Var& a, double alpha = kEluAlpha);
Var activate(Activation kind, const Var& a);

Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(const Var& a, std::size_t begin, std::size_t end);
Var pick(const Var& a, std::size_t r, std::size_t c);

enum class Reduce { kSum, kMean, kMax };
// kAll -> 1x1, kRows -> 1 x cols (reduces over rows), kCols -> rows x 1.
enum class Axis { kAll, kRows, kCols };
Var reduce(const Var& a, Reduce op, Axis axis = Axis::kAll);
Var sum(const Var& a);
Var mean(const Var& a);

Var softmax_rows(const Var& a);

// Column-wise standardization over rows: (x - mean) / sqrt(var + eps).
Var batch_norm(const Var& a, double eps = 1e-5);

// ---- graph primitives ----------------------------------------------------

// Rows of `a` indexed by the entries' source / destination node.
Var gather_src(const Var& a, const CsrPtr& csr);
Var gather_dst(const Var& a, const CsrPtr& csr);

// Per-segment reductions of entry rows (E x d -> segments x d). Empty
// segments produce zero rows.
Var segment_sum(const Var& e, const CsrPtr& csr);
Var segment_mean(const Var& e, const CsrPtr& csr);
Var segment_max(const Var& e, const CsrPtr& csr);
// Softmax of each column within each segment.
Var segment_softmax(const Var& e, const CsrPtr& csr);

// out[s] = sum_e weight[e] * x[src[e]]  (sparse adjacency multiply).
Var spmm(const CsrPtr& csr, const Var& x);
// Same with an additional per-entry coefficient column (E x 1).
Var spmm(const CsrPtr& csr, const Var& coef, const Var& x);

// n x d -> n x heads, summing each contiguous chunk of d / heads columns.
Var head_sum(const Var& a, std::size_t heads);
// n x heads -> n x width, repeating each head value over its chunk.
Var head_expand(const Var& a, std::size_t width);

// slots x d block per segment: entry k of segment s goes to columns
// [k*d, (k+1)*d) of row s; missing entries are zero, extra entries dropped.
Var pad_segments(const Var& e, const CsrPtr& csr, std::size_t slots);
// Row s = entry `position` of segment s (zero row if the segment is shorter).
Var segment_position(const Var& e, const CsrPtr& csr, std::size_t position);

}  // namespace qnas::ad
