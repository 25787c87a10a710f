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

#include <cmath>
#include <set>

#include "qnas/error.hpp"
#include "qnas/gnn/network.hpp"
#include "qnas/nas/hparams.hpp"
#include "qnas/nas/search.hpp"
#include "qnas/qubo.hpp"
#include "qnas/rng.hpp"

using namespace qnas;
using namespace qnas::nas;
using ad::Tensor;
using ad::Var;

namespace {

Graph k3() { return Graph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}); }

Tensor random_tensor(std::size_t r, std::size_t c, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Tensor t(r, c);
  for (auto& x : t.values()) x = nd(rng);
  return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

gnn::LayerCandidates singleton(const gnn::LayerSpec& l) {
  return {{l.attention}, {l.aggregation}, {l.activation}, {l.skip}};
}

gnn::NetworkSpec singleton_supernet(const gnn::ArchSpec& arch) {
  gnn::NetworkSpec s;
  for (const auto& l : arch.layers) {
    s.shapes.push_back({l.hidden, l.heads, l.two_hop});
    s.slots.push_back(singleton(l));
  }
  s.combine = {arch.combine};
  return s;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

SearchConfig quick_config(std::uint64_t seed) {
  SearchConfig c;
  c.seed = seed;
  c.epochs = 60;
  return c;
}

}  // namespace

TEST_CASE("noise is a no-op when sigma is zero or the gradient is large") {
  auto q = qubo_from_maxcut(k3());
  auto rng = make_rng(1);
  auto zero = ad::constant(Tensor(3, 1, 0.0));
  auto r = maybe_inject_noise(q, zero, 1e-3, 0.0, rng);
  CHECK_FALSE(r.injected);
  CHECK(r.loss.item() == 0.0);
  auto corner = ad::constant(Tensor::column({1.0, 0.0, 0.0}));
  r = maybe_inject_noise(q, corner, 1e-3, 1.0, rng);
  CHECK_FALSE(r.injected);
  CHECK(r.loss.item() == doctest::Approx(-2.0));
}

TEST_CASE("noise at the origin of K3 equals eps^T Q eps") {
  auto q = qubo_from_maxcut(k3());
  const double dense[3][3] = {{-2, 1, 1}, {1, -2, 1}, {1, 1, -2}};
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    auto rng = make_rng(seed);
    auto r = maybe_inject_noise(q, ad::constant(Tensor(3, 1, 0.0)), 1e-3, 0.7, rng);
    CHECK(r.injected);
    auto oracle_rng = make_rng(seed);
    std::normal_distribution<double> nd(0.0, 0.7);
    double eps[3];
    for (double& e : eps) e = nd(oracle_rng);
    double expect = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) expect += eps[i] * dense[i][j] * eps[j];
    CHECK(r.loss.item() == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("annealing schedule") {
  CHECK(anneal(1.0, 0.95) == doctest::Approx(0.95));
  CHECK(anneal(kSigmaFloor, 0.5) == kSigmaFloor);
  double s = 1.0;
  for (int t = 1; t <= 400; ++t) {
    s = anneal(s, 0.95);
    CHECK(s == doctest::Approx(std::max(std::pow(0.95, t), kSigmaFloor)).epsilon(1e-9));
  }
}

TEST_CASE("strict early stopping") {
  CHECK_FALSE(strict_early_stop({10, 9, 8}, 3, 1e-4));
  CHECK(strict_early_stop({10, 10, 10, 10}, 3, 1e-4));
  CHECK(strict_early_stop({1.0, 1.0 - 1e-5, 1.0 - 2e-5, 1.0 - 3e-5}, 3, 1e-4));
  CHECK_FALSE(strict_early_stop({1.0, 1.0 - 1e-5, 1.0 - 2e-5}, 3, 1e-4));
  // Any sequence no longer than the patience never stops.
  auto rng = make_rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t patience = 3; patience <= 7; ++patience)
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> h;
      for (std::size_t i = 0; i < patience; ++i) h.push_back(u(rng));
      CHECK_FALSE(strict_early_stop(h, patience, 1e-4));
    }
}

TEST_CASE("bilevel toy follows the first-order rule") {
  auto w = ad::parameter(Tensor(1, 1, 1.0), "w");
  auto a = ad::parameter(Tensor(1, 1, 0.0), "a");
  std::vector<Var> ws{w}, as{a};
  ad::Optimizer wo(ws, {}), ao(as, {});
  auto st = bilevel_step(
      ws, as, [&] { return ad::square(ad::sub(w, a)); }, [&] { return ad::square(w); }, 0.1, wo, ao);
  CHECK(st.train_loss == doctest::Approx(1.0));
  CHECK(st.val_loss == doctest::Approx(0.64));  // w' = 0.8
  REQUIRE(st.arch_grad.size() == 1);
  CHECK(st.arch_grad[0][0] == 0.0);
  // w descends from the original point, not from w'.
  CHECK(w.value()[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(a.value()[0] == 0.0);
  CHECK_THROWS_AS(bilevel_step(ws, as, [&] { return ad::square(w); }, [&] { return ad::square(w); }, -1.0, wo, ao),
                  InvalidArgument);
}

TEST_CASE("xi = 0 architecture gradient equals the direct gradient") {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(12, 0.3, 3));
  auto q = qubo_from_maxcut(g);
  auto ctx = gnn::make_context(g, true);
  auto spec = gnn::NetworkSpec::supernet({{8, 2, false}, {8, 2, true}});
  gnn::Network net(spec, 8, 7);
  net.add_embedding(g.num_nodes());
  auto m = [&] { return relaxed_hamiltonian(q, net.forward(ctx)); };
  for (auto& v : net.arch().all()) v.zero_grad();
  for (auto& v : net.weights().all()) v.zero_grad();
  ad::backward(m());
  std::vector<Tensor> direct;
  for (auto& v : net.arch().all()) direct.push_back(v.grad());
  auto& ws = net.weights().all();
  auto& as = net.arch().all();
  ad::Optimizer wo(ws, {}), ao(as, {});
  auto st = bilevel_step(ws, as, m, m, 0.0, wo, ao);
  REQUIRE(st.arch_grad.size() == direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) CHECK(max_abs_diff(st.arch_grad[i], direct[i]) <= 1e-10);
}

TEST_CASE("singleton supernet matches the fixed architecture") {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(15, 0.25, 8));
  auto ctx = gnn::make_context(g, true);
  auto rng = make_rng(9);
  for (int rep = 0; rep < 25; ++rep) {
    gnn::ArchSpec arch;
    std::size_t layers = 2 + rep % 3;
    for (std::size_t i = 0; i < layers; ++i) {
      gnn::LayerSpec l;
      l.attention = gnn::kAllAttention[rng() % gnn::kAllAttention.size()];
      l.aggregation = gnn::kAllAggregation[rng() % gnn::kAllAggregation.size()];
      l.activation = gnn::kAllActivation[rng() % gnn::kAllActivation.size()];
      l.skip = gnn::kAllSkip[rng() % gnn::kAllSkip.size()];
      l.hidden = 8;
      l.heads = (rng() % 2) ? 2 : 1;
      l.two_hop = rng() % 2;
      arch.layers.push_back(l);
    }
    arch.layers.back().skip = gnn::SkipOp::kIdentity;
    arch.combine = rep % 2 ? gnn::CombineOp::kAvg : gnn::CombineOp::kConcat;
    gnn::Network fixed(gnn::NetworkSpec::fixed(arch), 8, 21);
    gnn::Network super(singleton_supernet(arch), 8, 21);
    auto x = ad::constant(random_tensor(15, 8, rep));
    auto a = fixed.forward(ctx, x).value();
    auto b = super.forward(ctx, x).value();
    CHECK(max_abs_diff(a, b) <= 1e-12);
    CHECK(super.derive() == arch);
  }
}

TEST_CASE("mixture weights: uniform average and saturated logits") {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(10, 0.3, 2));
  auto ctx = gnn::make_context(g, false);
  auto base = gnn::gcn_default();
  for (auto& l : base.layers) l.hidden = 6;
  auto x = ad::constant(random_tensor(10, 6, 4));

  // Two activations in the last layer; everything downstream is linear.
  auto spec = singleton_supernet(base);
  spec.slots[1].activation = {gnn::Activation::kRelu, gnn::Activation::kTanh};
  gnn::Network mix(spec, 8, 5);
  auto relu_arch = base, tanh_arch = base;
  tanh_arch.layers[1].activation = gnn::Activation::kTanh;
  auto p_relu = gnn::Network(gnn::NetworkSpec::fixed(relu_arch), 8, 5).forward(ctx, x).value();
  auto p_tanh = gnn::Network(gnn::NetworkSpec::fixed(tanh_arch), 8, 5).forward(ctx, x).value();
  mix.arch().get("alpha.layer1.activation").mutable_value().fill(0.0);
  auto p_mix = mix.forward(ctx, x).value();
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(logit(p_mix[i]) == doctest::Approx(0.5 * (logit(p_relu[i]) + logit(p_tanh[i]))).epsilon(1e-9));

  // Saturating one attention candidate reproduces it.
  auto spec2 = singleton_supernet(base);
  spec2.slots[0].attention = {gnn::AttentionOp::kGat, gnn::AttentionOp::kGcn};
  gnn::Network sat(spec2, 8, 5);
  auto& row = sat.arch().get("alpha.layer0.attention").mutable_value();
  row[0] = 0.0;
  row[1] = 50.0;
  auto p_gcn = gnn::Network(gnn::NetworkSpec::fixed(base), 8, 5).forward(ctx, x).value();
  CHECK(max_abs_diff(sat.forward(ctx, x).value(), p_gcn) <= 1e-6);
  CHECK(max_abs_diff(sat.forward(ctx, x, gnn::ForwardMode::kDiscrete).value(), p_gcn) <= 1e-12);
}

TEST_CASE("derivation tie-break and scale invariance") {
  auto spec = gnn::NetworkSpec::supernet({{4, 1, false}, {4, 1, false}});
  gnn::Network net(spec, 4, 3);
  for (auto& v : net.arch().all()) v.mutable_value().fill(0.0);
  auto d = net.derive();
  for (const auto& l : d.layers) {
    CHECK(l.attention == gnn::AttentionOp::kConst);
    CHECK(l.aggregation == gnn::Aggregation::kSum);
    CHECK(l.activation == gnn::Activation::kSigmoid);
    CHECK(l.skip == gnn::SkipOp::kIdentity);
  }
  CHECK(d.combine == gnn::CombineOp::kAvg);

  auto rng = make_rng(11);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    for (auto& v : net.arch().all())
      for (auto& x : v.mutable_value().values()) x = nd(rng);
    auto before = net.derive();
    double k = 0.01 + 10.0 * std::abs(nd(rng));
    for (auto& v : net.arch().all())
      for (auto& x : v.mutable_value().values()) x *= k;
    CHECK(net.derive() == before);
  }
  // One-hot logits pick that candidate.
  for (auto& v : net.arch().all()) v.mutable_value().fill(0.0);
  net.arch().get("alpha.layer1.aggregation").mutable_value()[4] = 1.0;
  CHECK(net.derive().layers[1].aggregation == gnn::Aggregation::kRnn);
}

TEST_CASE("bilevel steps decrease the validation metric") {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(20, 0.2, 1));
  auto q = qubo_from_maxcut(g);
  auto ctx = gnn::make_context(g, false);
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    gnn::Network net(gnn::NetworkSpec::supernet({{16, 1, false}, {16, 1, false}}), 20, seed);
    net.add_embedding(20);
    auto m = [&] { return relaxed_hamiltonian(q, net.forward(ctx)); };
    SearchConfig cfg;
    ad::Optimizer wo(net.weights().all(), cfg.weight_optimizer()), ao(net.arch().all(), cfg.arch_optimizer());
    double first = m().item(), best = first;
    for (int step = 0; step < 100; ++step)
      best = std::min(best, bilevel_step(net.weights().all(), net.arch().all(), m, m, cfg.xi, wo, ao).val_loss);
    if (best < first) ++improved;
  }
  CHECK(improved >= 4);
}

TEST_CASE("hyperparameter samples stay inside the table") {
  HyperparameterSpace space;
  auto rng = make_rng(12);
  std::set<std::size_t> heads_seen;
  for (int i = 0; i < 2000; ++i) {
    auto h = space.sample(rng);
    CHECK(space.contains(h));
    CHECK(h.learning_rate >= 1e-4);
    CHECK(h.learning_rate <= 0.1);
    CHECK(h.layers >= 2);
    CHECK(h.layers <= 6);
    CHECK(h.heads >= 1);
    CHECK(h.heads <= 32);
    CHECK(h.hidden >= 2);
    CHECK(h.hidden <= 512);
    CHECK(h.hidden % h.heads == 0);
    CHECK(h.patience >= 3);
    CHECK(h.patience <= 7);
    heads_seen.insert(h.heads);
    CHECK_NOTHROW(apply(SearchConfig{}, h).validate());
    CHECK_NOTHROW(apply(gnn::gcn_default(), h).validate());
  }
  CHECK(heads_seen.size() >= 5);
}

TEST_CASE("applying hyperparameters to an architecture") {
  Hyperparameters h;
  h.layers = 4;
  h.hidden = 16;
  h.heads = 4;
  h.two_hop = true;
  h.activation = gnn::Activation::kElu;
  auto a = apply(gnn::gcn_default(), h);
  REQUIRE(a.layers.size() == 4);
  CHECK(a.layers[1].activation == gnn::Activation::kRelu);
  CHECK(a.layers[3].activation == gnn::Activation::kElu);
  for (const auto& l : a.layers) {
    CHECK(l.hidden == 16);
    CHECK(l.heads == 4);
    CHECK(l.two_hop);
  }
  h.layers = 2;
  CHECK(apply(a, h).layers.size() == 2);
}

TEST_CASE("config and trial JSON round trip") {
  SearchConfig c;
  c.learning_rate = 0.0123456789;
  c.optimizer = ad::OptimizerKind::kAdamW;
  c.two_hop = true;
  c.candidates.attention = {gnn::AttentionOp::kGcn, gnn::AttentionOp::kGatCos};
  c.combine_candidates = {gnn::CombineOp::kConcat};
  c.seed = 99;
  auto text = write_search_config(c);
  CHECK(write_search_config(parse_search_config(text)) == text);
  CHECK(parse_search_config("{}").epochs == 300);
  CHECK_THROWS_AS(parse_search_config("{\"bogus\": 1}"), ParseError);
  CHECK_THROWS_AS(parse_search_config("{\"epochs\": 0}"), InvalidArgument);

  auto q = qubo_from_maxcut(k3());
  auto t = search(q, quick_config(1));
  auto j = trial_to_json(t);
  auto back = trial_from_json(j);
  CHECK(trial_to_json(back) == j);
  CHECK(back.arch == t.arch);
  CHECK(back.assignment == t.assignment);
}

TEST_CASE("search on K3 finds the optimal cut") {
  auto q = qubo_from_maxcut(k3());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto t = search(q, quick_config(seed));
    CHECK(t.objective == 2.0);
    CHECK(t.hamiltonian == -2.0);
    CHECK(t.valid);
  }
}

TEST_CASE("search is deterministic per seed") {
  auto q = qubo_from_maxcut(gen_random(RandomGraphSpec::erdos_renyi(10, 0.4, 6)));
  auto a = search(q, quick_config(3));
  auto b = search(q, quick_config(3));
  CHECK(trial_to_json(a).size() > 0);
  CHECK(a.arch == b.arch);
  CHECK(a.assignment == b.assignment);
  CHECK(a.metric == b.metric);
}

TEST_CASE("GCN-only search space reduces to fixed GCN training") {
  auto g = gen_random(RandomGraphSpec::d_regular(20, 3, 2));
  auto q = qubo_from_maxcut(g);
  auto cfg = quick_config(4);
  cfg.epochs = 150;
  cfg.candidates = {{gnn::AttentionOp::kGcn}, {gnn::Aggregation::kSum}, {gnn::Activation::kRelu}, {gnn::SkipOp::kIdentity}};
  cfg.combine_candidates = {gnn::CombineOp::kAvg};
  auto s = search(q, cfg);
  CHECK(s.arch == gnn::gcn_default());
  // Within the spread of fixed-GCN runs and never above the optimum.
  double lo = 1e300;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = cfg;
    c.seed = seed;
    lo = std::min(lo, -train_fixed(q, gnn::gcn_default(), c).hamiltonian);
  }
  CHECK(s.objective >= lo);
  CHECK(s.objective <= -brute_force_optimum(q, 4).value);
}

TEST_CASE("hyperparameter search: single trial and nested budgets") {
  auto q = qubo_from_maxcut(gen_random(RandomGraphSpec::erdos_renyi(8, 0.5, 1)));
  auto base = quick_config(5);
  HyperparameterSpace space;
  space.epochs_max = 40;
  space.hidden = {4, 8, 16};
  auto r1 = hyperparameter_search(q, space, 1, base, 1);
  REQUIRE(r1.trials.size() == 1);
  CHECK(r1.best.hamiltonian == r1.trials[0].hamiltonian);
  CHECK(r1.best.seed == r1.trials[0].seed);
  double prev = r1.best.hamiltonian;
  for (std::size_t b : {2u, 4u}) {
    auto r = hyperparameter_search(q, space, b, base, 2);
    REQUIRE(r.trials.size() == b);
    CHECK(r.trials[0].seed == r1.trials[0].seed);
    CHECK(r.trials[0].hamiltonian == r1.trials[0].hamiltonian);
    CHECK(r.best.hamiltonian <= prev);
    prev = r.best.hamiltonian;
  }
  CHECK_THROWS_AS(hyperparameter_search(q, space, 0, base, 1), InvalidArgument);
}

TEST_CASE("distribution-mode MIS search yields independent sets") {
  std::vector<QuboInstance> train, val;
  for (std::uint64_t i = 0; i < 20; ++i) train.push_back(qubo_from_mis(gen_random(RandomGraphSpec::erdos_renyi(50, 0.1, i))));
  for (std::uint64_t i = 0; i < 10; ++i) val.push_back(qubo_from_mis(gen_random(RandomGraphSpec::erdos_renyi(50, 0.1, 100 + i))));
  auto cfg = quick_config(0);
  cfg.epochs = 10;
  auto t = search(train, val, cfg);
  CHECK(t.valid);
  CHECK(t.objective > 0.0);
}
