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

#include "qnas/gnn/context.hpp"

#include <algorithm>

#include "qnas/error.hpp"

namespace qnas::gnn {

namespace {

Neighborhood build(std::size_t n, std::vector<std::vector<std::pair<std::uint32_t, double>>> lists) {
  Neighborhood nb;
  auto csr = std::make_shared<ad::Csr>(ad::Csr::from_lists(n, std::move(lists)));
  const std::size_t e = csr->num_entries();
  ad::Tensor w(e, 1), inv(e, 1), inv1(e, 1), gcn(e, 1), sage(e, 1), self(n, 1);
  for (std::size_t s = 0; s < n; ++s) {
    const double k = static_cast<double>(csr->segment_size(s));
    self[s] = 1.0 / (k + 1.0);
    for (std::size_t i = csr->offsets[s]; i < csr->offsets[s + 1]; ++i) {
      w[i] = csr->weight[i];
      inv[i] = 1.0 / k;
      inv1[i] = 1.0 / (k + 1.0);
      gcn[i] = csr->weight[i] / k;
      sage[i] = csr->weight[i] / (k + 1.0);
    }
  }
  nb.weight = ad::constant(std::move(w));
  nb.ones = ad::constant(ad::Tensor(e, 1, 1.0));
  nb.inv_size = ad::constant(std::move(inv));
  nb.inv_size1 = ad::constant(std::move(inv1));
  nb.gcn_coef = ad::constant(std::move(gcn));
  nb.sage_coef = ad::constant(std::move(sage));
  nb.self_sage = ad::constant(std::move(self));
  nb.sequence_len = std::min(csr->max_segment, kMaxSequence);
  for (std::size_t t = 0; t < nb.sequence_len; ++t) {
    ad::Tensor m(n, 1);
    for (std::size_t s = 0; s < n; ++s) m[s] = csr->segment_size(s) > t ? 1.0 : 0.0;
    nb.step_mask.push_back(ad::constant(std::move(m)));
  }
  nb.csr = std::move(csr);
  return nb;
}

}  // namespace

const Neighborhood& GraphContext::hood(bool two) const {
  if (two && !two_hop.csr) throw InvalidArgument("graph context was built without two-hop neighborhoods");
  return two ? two_hop : one_hop;
}

GraphContext make_context(const Graph& g, bool two_hop) {
  GraphContext ctx;
  ctx.num_nodes = g.num_nodes();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> lists(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    for (const auto& nb : g.adjacency(v)) lists[v].emplace_back(nb.node, nb.w);
  ctx.one_hop = build(g.num_nodes(), std::move(lists));
  if (two_hop) {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> two(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      for (NodeId u : two_hop_neighbors(g, v)) two[v].emplace_back(u, 1.0);
    ctx.two_hop = build(g.num_nodes(), std::move(two));
  }
  return ctx;
}

}  // namespace qnas::gnn
