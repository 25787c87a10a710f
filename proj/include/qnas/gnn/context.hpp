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
#include "qnas/graph.hpp"

namespace qnas::gnn {

// CONCAT, RNN and LSTM consume at most this many neighbors per node (the
// lowest ids); larger neighborhoods are truncated.
inline constexpr std::size_t kMaxSequence = 64;

// Message index for one neighborhood kind plus the constant columns the
// operators need. All Vars here are constants.
struct Neighborhood {
  ad::CsrPtr csr;
  ad::Var weight;     // E x 1 edge weights (1 for two-hop entries)
  ad::Var ones;       // E x 1
  ad::Var inv_size;   // E x 1: 1 / |N(v)|
  ad::Var inv_size1;  // E x 1: 1 / (|N(v)| + 1)
  ad::Var gcn_coef;   // E x 1: w / |N(v)|
  ad::Var sage_coef;  // E x 1: w / (|N(v)| + 1)
  ad::Var self_sage;  // n x 1: 1 / (|N(v)| + 1)
  std::size_t sequence_len = 0;  // min(max |N(v)|, kMaxSequence)
  std::vector<ad::Var> step_mask;  // sequence_len columns n x 1: 1 where |N(v)| > t
};

struct GraphContext {
  std::size_t num_nodes = 0;
  Neighborhood one_hop;
  Neighborhood two_hop;  // empty csr unless requested
  const Neighborhood& hood(bool two) const;
};

// Builds 1-hop neighborhoods and, when `two_hop` is set, the two-hop sets
// (nodes sharing a common neighbor, v itself excluded).
GraphContext make_context(const Graph& g, bool two_hop);

}  // namespace qnas::gnn
