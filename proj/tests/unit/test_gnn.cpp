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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qnas/ad/gradcheck.hpp"
#include "qnas/error.hpp"
#include "qnas/gnn/layers.hpp"
#include "qnas/gnn/network.hpp"
#include "qnas/graph.hpp"
#include "qnas/rng.hpp"

using namespace qnas;
using namespace qnas::gnn;
using ad::Tensor;
using ad::Var;

namespace {

Graph k3() { return Graph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}); }

Tensor random_tensor(std::size_t r, std::size_t c, std::uint64_t seed, double scale = 1.0) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Tensor t(r, c);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = nd(rng);
  return t;
}

ArchSpec one_layer_kind(AttentionOp att, Aggregation agg, Activation act, std::size_t hidden = 4,
                        std::size_t heads = 1, bool two_hop = false) {
  ArchSpec a;
  LayerSpec l{att, agg, act, heads, hidden, two_hop, SkipOp::kIdentity};
  a.layers = {l, l};
  return a;
}

}  // namespace

TEST_CASE("op names round-trip and accept table spellings") {
  for (auto op : kAllAttention) CHECK(parse_attention(name(op)) == op);
  for (auto op : kAllAggregation) CHECK(parse_aggregation(name(op)) == op);
  for (auto op : kAllActivation) CHECK(parse_activation(name(op)) == op);
  for (auto op : kAllSkip) CHECK(parse_skip(name(op)) == op);
  for (auto op : kAllCombine) CHECK(parse_combine(name(op)) == op);
  CHECK(parse_attention("CNN") == AttentionOp::kConst);
  CHECK(parse_attention("graphsage-max") == AttentionOp::kSageMax);
  CHECK(parse_activation("SIGMOD") == Activation::kSigmoid);
  CHECK(parse_activation("THAN") == Activation::kTanh);
  CHECK_THROWS_AS(parse_attention("CONV"), InvalidArgument);
}

TEST_CASE("arch text round-trip and validation") {
  ArchSpec a;
  a.layers = {LayerSpec{AttentionOp::kGat, Aggregation::kLstm, Activation::kElu, 4, 16, true, SkipOp::kSkipCat},
              LayerSpec{AttentionOp::kGin, Aggregation::kConcat, Activation::kLinear, 1, 8, false, SkipOp::kStack},
              LayerSpec{AttentionOp::kConst, Aggregation::kMax, Activation::kTanh, 2, 2, false, SkipOp::kZero}};
  a.combine = CombineOp::kConcat;
  CHECK(parse_arch(write_arch(a)) == a);
  CHECK(parse_arch(write_arch(gcn_default())) == gcn_default());
  CHECK(combine_width(a) == 24);

  auto bad = a;
  bad.layers[0].heads = 6;  // 16 % 6 != 0
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = a;
  for (auto& l : bad.layers) l.skip = SkipOp::kZero;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = a;
  bad.layers.resize(1);
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(parse_arch("qnas-arch v1\nlayers 1\ncombine AVG\nlayer 0 attention=GCN\n"), ParseError);
  CHECK_THROWS_AS(parse_arch("qnas-arch v2\n"), ParseError);
}

TEST_CASE("CONST scores are 1 on K3 and GCN coefficients are 1/deg") {
  auto ctx = make_context(k3(), false);
  auto z = ad::constant(random_tensor(3, 4, 1));
  auto s = attention_scores(AttentionOp::kConst, z, ctx.one_hop, 1, {});
  for (std::size_t i = 0; i < s.value().size(); ++i) CHECK(s.value()[i] == 1.0);
  auto g = attention_coefficients(AttentionOp::kGcn, z, ctx.one_hop, 1, {});
  for (std::size_t i = 0; i < g.value().size(); ++i) CHECK(g.value()[i] == doctest::Approx(0.5));
}

TEST_CASE("GAT-COS of identical states is 1 before softmax") {
  auto ctx = make_context(k3(), false);
  Tensor row = random_tensor(1, 6, 2);
  Tensor z(3, 6);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 6; ++c) z(r, c) = row(0, c);
  auto s = attention_scores(AttentionOp::kGatCos, ad::constant(z), ctx.one_hop, 2, {});
  CHECK(s.cols() == 2);
  for (std::size_t i = 0; i < s.value().size(); ++i) CHECK(s.value()[i] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("GAT-SYM scores are symmetric") {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(12, 0.4, 5));
  auto ctx = make_context(g, false);
  auto z = ad::constant(random_tensor(12, 8, 3));
  AttentionParams p{ad::constant(random_tensor(1, 8, 4)), ad::constant(random_tensor(1, 8, 5)), {}};
  auto s = attention_scores(AttentionOp::kGatSym, z, ctx.one_hop, 2, p);
  const auto& csr = *ctx.one_hop.csr;
  for (std::size_t e = 0; e < csr.num_entries(); ++e) {
    // Find the reverse entry (dst -> src).
    const auto v = csr.dst[e], u = csr.src[e];
    std::size_t r = csr.offsets[u];
    while (csr.src[r] != v) ++r;
    for (std::size_t h = 0; h < 2; ++h) CHECK(s.value()(e, h) == doctest::Approx(s.value()(r, h)).epsilon(1e-14));
  }
}

TEST_CASE("aggregators: MEAN of identical messages, SUM on an isolated node") {
  Graph g(4, {{0, 1, 1.0}, {0, 2, 1.0}});
  auto ctx = make_context(g, false);
  const auto& nb = ctx.one_hop;
  Tensor m(nb.csr->num_entries(), 3);
  for (std::size_t e = 0; e < m.rows(); ++e)
    for (std::size_t c = 0; c < 3; ++c) m(e, c) = 1.5 + static_cast<double>(c);
  auto mean = aggregate(Aggregation::kMean, ad::constant(m), nb, {}, {});
  for (std::size_t c = 0; c < 3; ++c) CHECK(mean.value()(0, c) == doctest::Approx(1.5 + static_cast<double>(c)));
  auto sum = aggregate(Aggregation::kSum, ad::constant(m), nb, {}, {});
  for (std::size_t c = 0; c < 3; ++c) CHECK(sum.value()(3, c) == 0.0);
}

TEST_CASE("LSTM aggregator depends on neighbor order") {
  // Star: node 0 sees leaves 1..3 in ascending order. Swapping two leaf
  // messages changes the sequence and therefore the output.
  Graph g(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  auto ctx = make_context(g, false);
  const auto& nb = ctx.one_hop;
  const std::size_t d = 3;
  RecurrentParams rp{ad::constant(random_tensor(d, 4 * d, 6, 0.5)), ad::constant(random_tensor(d, 4 * d, 7, 0.5)),
                     ad::constant(Tensor(1, 4 * d))};
  Tensor m = random_tensor(nb.csr->num_entries(), d, 8);
  auto a = aggregate(Aggregation::kLstm, ad::constant(m), nb, {}, rp);
  Tensor swapped = m;
  for (std::size_t c = 0; c < d; ++c) std::swap(swapped(0, c), swapped(1, c));  // node 0's first two entries
  auto b = aggregate(Aggregation::kLstm, ad::constant(swapped), nb, {}, rp);
  double diff = 0.0;
  for (std::size_t c = 0; c < d; ++c) diff += std::abs(a.value()(0, c) - b.value()(0, c));
  CHECK(diff > 1e-6);
  // SUM is order-free.
  auto sa = aggregate(Aggregation::kSum, ad::constant(m), nb, {}, {});
  auto sb = aggregate(Aggregation::kSum, ad::constant(swapped), nb, {}, {});
  for (std::size_t c = 0; c < d; ++c) CHECK(sa.value()(0, c) == doctest::Approx(sb.value()(0, c)));
}

TEST_CASE("skip and combine semantics") {
  auto h0 = ad::constant(Tensor(5, 4));
  auto h1 = ad::constant(random_tensor(5, 4, 9));
  auto s = apply_skip(SkipOp::kSkipSum, {h0, h1}, {});
  CHECK(s.value() == h1.value());
  CHECK(apply_skip(SkipOp::kIdentity, {h0, h1}, {}).value() == h1.value());
  auto z = apply_skip(SkipOp::kZero, {h0, h1}, {});
  CHECK(z.value() == Tensor(5, 4));
  auto avg = combine(CombineOp::kAvg, {h1}, {});
  CHECK(avg.value() == h1.value());
  auto h2 = ad::constant(random_tensor(5, 3, 10));
  CHECK(combine(CombineOp::kConcat, {h1, h2}, {}).cols() == 7);
  CHECK_THROWS_AS(combine(CombineOp::kAvg, {}, {}), InvalidArgument);
}

TEST_CASE("single GCN layer on K3 matches the hand expansion") {
  // All-ones features, W = I, B = 0, linear activation: each node averages
  // its two neighbors, (1 + 1) / 2 = 1 in every coordinate.
  NetworkSpec spec = NetworkSpec::fixed(one_layer_kind(AttentionOp::kGcn, Aggregation::kSum, Activation::kLinear, 3));
  Network net(spec, 1, 1);
  auto& w = net.weights().get("layer0.att.GCN.W").mutable_value();
  w.fill(0.0);
  for (std::size_t i = 0; i < 3; ++i) w(i, i) = 1.0;
  net.weights().get("layer0.att.GCN.B").mutable_value().fill(0.0);
  auto ctx = make_context(k3(), false);
  auto x = ad::constant(Tensor(3, 3, 1.0));
  auto& nb = ctx.one_hop;
  auto z = ad::matmul(x, net.weights().get("layer0.att.GCN.W"));
  auto coef = attention_coefficients(AttentionOp::kGcn, z, nb, 1, {});
  auto out = aggregate(Aggregation::kSum, ad::mul_col(ad::gather_src(z, nb.csr), coef), nb, {}, {});
  for (std::size_t i = 0; i < out.value().size(); ++i) CHECK(out.value()[i] == doctest::Approx(1.0));
}

TEST_CASE("zero weights give p = 0.5 everywhere") {
  Network net(NetworkSpec::fixed(gcn_default()), 1, 3);
  for (auto& p : net.weights().all()) p.mutable_value().fill(0.0);
  auto g = gen_random(RandomGraphSpec::erdos_renyi(10, 0.3, 1));
  auto ctx = make_context(g, false);
  auto p = net.forward(ctx, ad::constant(random_tensor(10, 32, 2)));
  for (std::size_t i = 0; i < 10; ++i) CHECK(p.value()[i] == 0.5);
}

TEST_CASE("every attention x aggregation x activation runs on a 10-node graph") {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(10, 0.3, 11));
  auto ctx = make_context(g, true);
  for (auto att : kAllAttention)
    for (auto agg : kAllAggregation)
      for (auto act : kAllActivation) {
        auto arch = one_layer_kind(att, agg, act, 4, 2, true);
        arch.layers[0].two_hop = false;
        Network net(NetworkSpec::fixed(arch), ctx.one_hop.sequence_len, 5);
        net.add_embedding(10);
        auto p = net.forward(ctx, ForwardMode::kDiscrete);
        REQUIRE(p.rows() == 10);
        for (std::size_t i = 0; i < 10; ++i) {
          CHECK(std::isfinite(p.value()[i]));
          CHECK(p.value()[i] >= 0.0);
          CHECK(p.value()[i] <= 1.0);
        }
      }
}

TEST_CASE("two-hop layer on a single edge equals the empty-neighborhood output") {
  Graph g(2, {{0, 1, 1.0}});
  auto ctx = make_context(g, true);
  CHECK(ctx.two_hop.csr->num_entries() == 0);
  auto arch = one_layer_kind(AttentionOp::kGcn, Aggregation::kSum, Activation::kRelu, 4, 1, true);
  Network net(NetworkSpec::fixed(arch), 1, 2);
  auto x = ad::constant(random_tensor(2, 4, 3));
  auto p = net.forward(ctx, x);
  // With no neighbors the layer reduces to relu(x B + bias).
  Graph empty(2, {});
  auto ectx = make_context(empty, false);
  auto arch1 = arch;
  for (auto& l : arch1.layers) l.two_hop = false;
  Network net1(NetworkSpec::fixed(arch1), 1, 2);
  auto q = net1.forward(ectx, x);
  for (std::size_t i = 0; i < 2; ++i) CHECK(p.value()[i] == q.value()[i]);
}

TEST_CASE("permutation equivariance of order-invariant architectures") {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(9, 0.4, 21));
  std::vector<NodeId> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), make_rng(4));
  std::vector<Edge> pe;
  for (const auto& e : g.edges()) pe.push_back({perm[e.u], perm[e.v], e.w});
  Graph pg(9, pe);
  auto ctx = make_context(g, true), pctx = make_context(pg, true);
  Tensor x = random_tensor(9, 8, 5), px(9, 8);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t c = 0; c < 8; ++c) px(perm[i], c) = x(i, c);
  for (auto att : kAllAttention)
    for (auto agg : {Aggregation::kSum, Aggregation::kMax, Aggregation::kMean}) {
      auto arch = one_layer_kind(att, agg, Activation::kTanh, 8, 2);
      arch.layers[1].two_hop = true;
      arch.layers[1].skip = SkipOp::kSkipCat;
      arch.combine = CombineOp::kConcat;
      Network net(NetworkSpec::fixed(arch), 1, 6);
      auto p = net.forward(ctx, ad::constant(x));
      auto pp = net.forward(pctx, ad::constant(px));
      for (std::size_t i = 0; i < 9; ++i) CHECK(pp.value()[perm[i]] == doctest::Approx(p.value()[i]).epsilon(1e-12));
    }
}

TEST_CASE("end-to-end gradients match finite differences") {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(12, 0.35, 31));
  auto ctx = make_context(g, true);
  auto check_net = [&](Network& net) {
    net.add_embedding(12);
    std::vector<Var> params = net.weights().all();
    for (auto& a : net.arch().all()) params.push_back(a);
    auto f = [&] { return ad::sum(ad::square(net.forward(ctx))); };
    auto r = ad::check_gradients(f, params, {.step = 1e-5, .max_coords_per_param = 16, .seed = 3});
    INFO("worst parameter: " << r.worst_param);
    CHECK(r.max_rel_error <= 1e-4);
  };
  SUBCASE("GCN only") {
    Network net(NetworkSpec::fixed(gcn_default()), 1, 1);
    check_net(net);
  }
  SUBCASE("GAT with two-hop") {
    auto arch = one_layer_kind(AttentionOp::kGat, Aggregation::kSum, Activation::kElu, 8, 2, true);
    Network net(NetworkSpec::fixed(arch), 1, 2);
    check_net(net);
  }
  SUBCASE("full supernet") {
    auto spec = NetworkSpec::supernet({{8, 2, false}, {8, 2, true}, {4, 1, false}});
    Network net(spec, ctx.one_hop.sequence_len, 3);
    check_net(net);
  }
}
