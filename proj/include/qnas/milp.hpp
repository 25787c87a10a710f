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
#include <string>
#include <vector>

namespace qnas {

struct MatrixEntry {
  std::uint32_t row;  // constraint index
  std::uint32_t col;  // variable index
  double value;
  bool operator==(const MatrixEntry&) const = default;
};

// min c^T x  s.t.  A x <= b,  l <= x <= u,  x_i integer where tau_i = 1.
// A is stored sparse, sorted by (row, col), without explicit zeros. Bounds
// may be -inf / +inf.
struct MilpInstance {
  std::size_t num_vars = 0;
  std::size_t num_cons = 0;
  std::vector<double> c;
  std::vector<MatrixEntry> a;
  std::vector<double> b;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::uint8_t> integral;

  // Throws InvalidArgument on inconsistent sizes, l > u, explicit zeros or
  // unsorted / duplicate entries.
  void validate() const;
};

// Field-by-field comparison on the bit patterns of every double.
bool bit_equal(const MilpInstance& x, const MilpInstance& y);

struct VarNodeFeature {
  double c = 0.0;
  double l_val = 0.0;  // 0 when l is infinite
  bool l_finite = true;
  double u_val = 0.0;  // 0 when u is infinite
  bool u_finite = true;
  std::uint8_t tau = 0;
  bool operator==(const VarNodeFeature&) const = default;
};

struct BipartiteEdge {
  std::uint32_t var;
  std::uint32_t con;
  double weight;  // A[con][var]
  bool operator==(const BipartiteEdge&) const = default;
};

// Variables and constraints as the two sides of a weighted bipartite graph.
struct BipartiteGraph {
  std::vector<VarNodeFeature> vars;
  std::vector<double> cons;  // b_j
  std::vector<BipartiteEdge> edges;
};

BipartiteGraph encode_bipartite(const MilpInstance& milp);
// Throws InvalidArgument when a finiteness flag disagrees with its value.
MilpInstance decode_bipartite(const BipartiteGraph& bg);

// Set covering: Ax >= 1 rewritten as -Ax <= -1, binary variables, integer
// costs in [1, 100]. Every row is repaired to have at least two columns.
MilpInstance gen_set_covering(std::size_t rows, std::size_t cols, double density, std::uint64_t seed);

struct FeatureMatrices {
  // Column order: c, l_val, l_finite, u_val, u_finite, tau.
  std::size_t num_vars = 0;
  std::vector<double> var_features;  // num_vars x 6, row-major
  std::vector<double> con_features;  // num_cons x 1
  std::vector<BipartiteEdge> edges;
  static constexpr std::size_t kVarWidth = 6;
};

FeatureMatrices featurize(const BipartiteGraph& bg);

// Instance text format:
//   milp <n> <m>
//   c <n values>
//   b <m values>
//   l <n values, may be -inf>
//   u <n values, may be inf>
//   tau <n 0/1 values>
//   nnz <k>
//   <k lines "row col value", 0-based>
std::string write_milp(const MilpInstance& milp);
MilpInstance parse_milp(const std::string& text);

// Encoding text format:
//   bipartite <vars> <cons> <edges>
//   v <c> <l_val> <l_finite> <u_val> <u_finite> <tau>   (one per variable)
//   k <b>                                              (one per constraint)
//   e <var> <con> <weight>                             (one per edge)
std::string write_bipartite(const BipartiteGraph& bg);

}  // namespace qnas
