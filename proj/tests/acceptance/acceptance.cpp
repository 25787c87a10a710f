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

// Acceptance runner. `acceptance` runs every criterion; `acceptance 3 5`
// runs a subset. Each criterion prints one line "AC<k> PASS|FAIL ..." and the
// exit status is nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qnas/ad/gradcheck.hpp"
#include "qnas/ad/ops.hpp"
#include "qnas/bench/bench.hpp"
#include "qnas/gnn/network.hpp"
#include "qnas/graph.hpp"
#include "qnas/milp.hpp"
#include "qnas/nas/hparams.hpp"
#include "qnas/nas/search.hpp"
#include "qnas/qubo.hpp"
#include "qnas/rng.hpp"

using namespace qnas;
using ad::Tensor;
using ad::Var;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

Graph k3() { return Graph(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}}); }

Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(r, c);
  for (auto& x : t.values()) x = u(rng);
  return t;
}

// Plain double loop over the edge list, independent of the QUBO code.
double cut_oracle(const Graph& g, const BinaryAssignment& x) {
  double c = 0.0;
  for (const auto& e : g.edges())
    if (x[e.u] != x[e.v]) c += e.w;
  return c;
}

// ---- 1 ------------------------------------------------------------------

Outcome ac1() {
  const auto t0 = Clock::now();
  auto rng = make_rng(101);
  std::size_t checked = 0, bad = 0;
  for (std::uint64_t gi = 0; gi < 200; ++gi) {
    const std::size_t n = 2 + rng() % 49;
    const double p = std::uniform_real_distribution<double>(0.05, 0.9)(rng);
    auto g = gen_random(RandomGraphSpec::erdos_renyi(n, p, gi));
    auto qc = qubo_from_maxcut(g);
    auto qm = qubo_from_mis(g);
    for (int k = 0; k < 50; ++k) {
      BinaryAssignment x(n);
      for (auto& b : x) b = rng() & 1;
      bad += cut_oracle(g, x) != -hamiltonian(qc, x);
      // Random independent set: scan a random order and keep free nodes.
      std::vector<NodeId> order(n);
      for (NodeId v = 0; v < n; ++v) order[v] = v;
      std::shuffle(order.begin(), order.end(), rng);
      BinaryAssignment s(n, 0);
      for (NodeId v : order) {
        if (rng() % 3 == 0) continue;
        bool free = true;
        for (const auto& nb : g.adjacency(v)) free = free && !s[nb.node];
        if (free) s[v] = 1;
      }
      double size = 0.0;
      for (auto b : s) size += b;
      bad += hamiltonian(qm, s) != -size;
      checked += 2;
    }
  }
  const double secs = since(t0);
  return {bad == 0 && secs < 10.0,
          std::to_string(checked) + " identities, " + std::to_string(bad) + " mismatches, " + fmt(secs) + "s (limit 10s)"};
}

// ---- 2 ------------------------------------------------------------------

Outcome ac2() {
  const auto t0 = Clock::now();
  auto rng = make_rng(202);
  std::size_t below = 0, optimal = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::size_t n = 3 + rng() % 14;
    QuboInstance q;
    if (i % 3 == 0) {
      q = qubo_from_maxcut(gen_random(RandomGraphSpec::erdos_renyi(n, 0.4, i)));
    } else if (i % 3 == 1) {
      q = qubo_from_mis(gen_random(RandomGraphSpec::erdos_renyi(n, 0.3, i)));
    } else {
      std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
      std::uniform_int_distribution<int> u(-5, 5);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
          double v = (a == b || rng() % 2) ? u(rng) : 0.0;
          d[a][b] = d[b][a] = v;
        }
      q = QuboInstance::from_dense(d, Task::generic());
    }
    nas::SearchConfig cfg;
    cfg.seed = i;
    auto t = nas::search(q, cfg);
    auto oracle = brute_force_optimum(q);
    below += t.hamiltonian < oracle.value - 1e-9;
    optimal += std::abs(t.hamiltonian - oracle.value) <= 1e-9;
  }
  int k3_hits = 0, k2_hits = 0;
  const int seeds = 20;
  auto qk3 = qubo_from_maxcut(k3());
  auto qk2 = qubo_from_mis(Graph(2, {{0, 1, 1.0}}));
  for (int s = 0; s < seeds; ++s) {
    nas::SearchConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(s);
    k3_hits += nas::search(qk3, cfg).objective == 2.0;
    auto r = nas::search(qk2, cfg);
    k2_hits += r.objective == 1.0 && r.valid;
  }
  const double secs = since(t0);
  const bool pass = below == 0 && k3_hits >= 0.95 * seeds && k2_hits >= 0.95 * seeds && secs < 600.0;
  return {pass, "decoded H below H* on " + std::to_string(below) + "/100 (optimal on " + std::to_string(optimal) +
                    "); K3 cut=2 in " + std::to_string(k3_hits) + "/" + std::to_string(seeds) + ", K2 size=1 in " +
                    std::to_string(k2_hits) + "/" + std::to_string(seeds) + "; " + fmt(secs) + "s (limit 600s)"};
}

// ---- 3 ------------------------------------------------------------------

Outcome ac3() {
  const auto t0 = Clock::now();
  auto rng = make_rng(303);
  double worst = 0.0;
  std::string worst_name;
  std::size_t checks = 0;
  auto check = [&](const std::string& name, const std::function<Var()>& f, std::vector<Var> params) {
    auto r = ad::check_gradients(f, std::move(params), {.step = 1e-5, .max_coords_per_param = 32, .seed = 5});
    ++checks;
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_name = name + "/" + r.worst_param;
    }
  };

  Tensor kinkless = random_tensor(4, 6, rng);
  for (auto& x : kinkless.values()) x += x >= 0 ? 0.1 : -0.1;
  auto a = ad::parameter(kinkless, "a");
  auto b = ad::parameter(random_tensor(6, 3, rng), "b");
  auto c = ad::parameter(random_tensor(4, 6, rng, 0.5, 1.5), "c");
  auto row = ad::parameter(random_tensor(1, 6, rng), "row");
  auto col = ad::parameter(random_tensor(4, 1, rng), "col");
  auto s = ad::parameter(random_tensor(1, 1, rng), "s");
  auto w = ad::constant(random_tensor(4, 6, rng));
  check("matmul", [&] { return ad::sum(ad::square(ad::matmul(a, b))); }, {a, b});
  check("add/sub/mul", [&] { return ad::sum(ad::square(ad::mul(ad::add(a, c), ad::sub(a, c)))); }, {a, c});
  check("div", [&] { return ad::sum(ad::div(a, c)); }, {a, c});
  check("add_row/mul_row", [&] { return ad::sum(ad::square(ad::add_row(ad::mul_row(a, row), row))); }, {a, row});
  check("mul_col", [&] { return ad::sum(ad::square(ad::mul_col(a, col))); }, {a, col});
  check("scale_by", [&] { return ad::sum(ad::square(ad::scale_by(a, s))); }, {a, s});
  check("scale/add_scalar/sqrt", [&] { return ad::sum(ad::sqrt(ad::add_scalar(ad::scale(c, 2.0), 1.0))); }, {c});
  for (auto act : gnn::kAllActivation)
    check("activation " + gnn::name(act), [&] { return ad::sum(ad::mul(ad::activate(act, a), w)); }, {a});
  check("concat_cols", [&] { return ad::sum(ad::square(ad::concat_cols({a, c}))); }, {a, c});
  check("slice_cols", [&] { return ad::sum(ad::square(ad::slice_cols(a, 2, 5))); }, {a});
  check("pick", [&] { return ad::square(ad::pick(a, 1, 3)); }, {a});
  for (auto op : {ad::Reduce::kSum, ad::Reduce::kMean, ad::Reduce::kMax})
    for (auto ax : {ad::Axis::kAll, ad::Axis::kRows, ad::Axis::kCols})
      check("reduce", [&] { return ad::sum(ad::square(ad::reduce(a, op, ax))); }, {a});
  check("softmax_rows", [&] { return ad::sum(ad::mul(ad::softmax_rows(a), w)); }, {a});
  check("batch_norm", [&] { return ad::sum(ad::mul(ad::batch_norm(a), w)); }, {a});
  check("head_sum", [&] { return ad::sum(ad::square(ad::head_sum(a, 3))); }, {a});
  auto hd = ad::parameter(random_tensor(4, 2, rng), "h");
  check("head_expand", [&] { return ad::sum(ad::mul(ad::head_expand(hd, 6), w)); }, {hd});

  std::vector<std::vector<std::pair<std::uint32_t, double>>> lists{
      {{1, 0.5}, {2, 2.0}}, {{0, 0.5}}, {{0, 2.0}, {1, -1.0}, {4, 1.0}}, {}, {{2, 1.0}}};
  auto csr = std::make_shared<const ad::Csr>(ad::Csr::from_lists(5, lists));
  const auto E = csr->num_entries();
  auto x = ad::parameter(random_tensor(5, 3, rng), "x");
  auto e = ad::parameter(random_tensor(E, 3, rng), "e");
  auto coef = ad::parameter(random_tensor(E, 1, rng), "coef");
  auto we = ad::constant(random_tensor(E, 3, rng));
  check("gather_src", [&] { return ad::sum(ad::square(ad::gather_src(x, csr))); }, {x});
  check("gather_dst", [&] { return ad::sum(ad::square(ad::gather_dst(x, csr))); }, {x});
  check("segment_sum", [&] { return ad::sum(ad::square(ad::segment_sum(e, csr))); }, {e});
  check("segment_mean", [&] { return ad::sum(ad::square(ad::segment_mean(e, csr))); }, {e});
  check("segment_max", [&] { return ad::sum(ad::square(ad::segment_max(e, csr))); }, {e});
  check("segment_softmax", [&] { return ad::sum(ad::mul(ad::segment_softmax(e, csr), we)); }, {e});
  check("spmm", [&] { return ad::sum(ad::square(ad::spmm(csr, x))); }, {x});
  check("spmm coef", [&] { return ad::sum(ad::square(ad::spmm(csr, coef, x))); }, {x, coef});
  check("pad_segments", [&] { return ad::sum(ad::square(ad::pad_segments(e, csr, 2))); }, {e});
  check("segment_position", [&] { return ad::sum(ad::square(ad::segment_position(e, csr, 1))); }, {e});
  auto q = qubo_from_maxcut(gen_random(RandomGraphSpec::erdos_renyi(5, 0.6, 3)));
  auto pv = ad::parameter(random_tensor(5, 1, rng, 0.0, 1.0), "p");
  check("relaxed_hamiltonian", [&] { return relaxed_hamiltonian(q, pv); }, {pv});

  auto g = gen_random(RandomGraphSpec::erdos_renyi(12, 0.35, 31));
  auto ctx = gnn::make_context(g, true);
  auto check_net = [&](const std::string& name, gnn::Network& net) {
    net.add_embedding(12);
    std::vector<Var> params = net.weights().all();
    for (auto& v : net.arch().all()) params.push_back(v);
    auto qq = qubo_from_maxcut(g);
    check(name, [&] { return relaxed_hamiltonian(qq, net.forward(ctx)); }, params);
  };
  gnn::Network gcn(gnn::NetworkSpec::fixed(gnn::gcn_default()), 1, 1);
  check_net("GCN-only", gcn);
  gnn::ArchSpec gat;
  gat.layers.assign(2, {gnn::AttentionOp::kGat, gnn::Aggregation::kSum, gnn::Activation::kElu, 2, 8, true,
                        gnn::SkipOp::kIdentity});
  gnn::Network gatnet(gnn::NetworkSpec::fixed(gat), 1, 2);
  check_net("GAT+two-hop", gatnet);
  gnn::Network super(gnn::NetworkSpec::supernet({{8, 2, false}, {8, 2, true}}), ctx.one_hop.sequence_len, 3);
  check_net("mixed supernet", super);

  const double secs = since(t0);
  return {worst <= 1e-4 && secs < 120.0, std::to_string(checks) + " checks, max rel error " + fmt(worst) + " (" +
                                             worst_name + "), " + fmt(secs) + "s (limits 1e-4, 120s)"};
}

// ---- 4 ------------------------------------------------------------------

Outcome ac4() {
  auto g = gen_random(RandomGraphSpec::erdos_renyi(15, 0.25, 8));
  auto ctx = gnn::make_context(g, true);
  auto rng = make_rng(404);
  double worst_fixed = 0.0;
  for (int rep = 0; rep < 40; ++rep) {
    gnn::ArchSpec arch;
    for (std::size_t i = 0; i < 2 + static_cast<std::size_t>(rep % 3); ++i) {
      gnn::LayerSpec l;
      l.attention = gnn::kAllAttention[rng() % gnn::kAllAttention.size()];
      l.aggregation = gnn::kAllAggregation[rng() % gnn::kAllAggregation.size()];
      l.activation = gnn::kAllActivation[rng() % gnn::kAllActivation.size()];
      l.skip = gnn::kAllSkip[rng() % gnn::kAllSkip.size()];
      l.hidden = 8;
      l.heads = rng() % 2 ? 2 : 1;
      l.two_hop = rng() % 2;
      arch.layers.push_back(l);
    }
    arch.layers.back().skip = gnn::SkipOp::kIdentity;
    arch.combine = rep % 2 ? gnn::CombineOp::kAvg : gnn::CombineOp::kConcat;
    gnn::NetworkSpec single;
    for (const auto& l : arch.layers) {
      single.shapes.push_back({l.hidden, l.heads, l.two_hop});
      single.slots.push_back({{l.attention}, {l.aggregation}, {l.activation}, {l.skip}});
    }
    single.combine = {arch.combine};
    gnn::Network fixed(gnn::NetworkSpec::fixed(arch), 8, 50 + rep);
    gnn::Network sn(single, 8, 50 + rep);
    auto x = ad::constant(random_tensor(15, 8, rng));
    auto a = fixed.forward(ctx, x).value();
    auto b = sn.forward(ctx, x).value();
    for (std::size_t i = 0; i < a.size(); ++i) worst_fixed = std::max(worst_fixed, std::abs(a[i] - b[i]));
  }

  double worst_grad = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto q = qubo_from_maxcut(g);
    gnn::Network net(gnn::NetworkSpec::supernet({{8, 2, false}, {8, 1, true}}), 8, seed);
    net.add_embedding(g.num_nodes());
    auto m = [&] { return relaxed_hamiltonian(q, net.forward(ctx)); };
    for (auto& v : net.weights().all()) v.zero_grad();
    for (auto& v : net.arch().all()) v.zero_grad();
    ad::backward(m());
    std::vector<Tensor> direct;
    for (auto& v : net.arch().all()) direct.push_back(v.grad());
    ad::Optimizer wo(net.weights().all(), {}), ao(net.arch().all(), {});
    auto st = nas::bilevel_step(net.weights().all(), net.arch().all(), m, m, 0.0, wo, ao);
    for (std::size_t i = 0; i < direct.size(); ++i)
      for (std::size_t k = 0; k < direct[i].size(); ++k)
        worst_grad = std::max(worst_grad, std::abs(direct[i][k] - st.arch_grad[i][k]));
  }
  return {worst_fixed <= 1e-12 && worst_grad <= 1e-10,
          "singleton vs fixed max diff " + fmt(worst_fixed) + " (limit 1e-12); xi=0 arch grad diff " + fmt(worst_grad) +
              " (limit 1e-10)"};
}

// ---- 5 ------------------------------------------------------------------

Outcome ac5() {
  auto q = qubo_from_maxcut(k3());
  int with_noise = 0, without = 0;
  nas::TrainOptions opts;
  opts.symmetric_init = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    nas::SearchConfig cfg;
    cfg.seed = s;
    cfg.noise = true;
    with_noise += nas::train_fixed(q, gnn::gcn_default(), cfg, opts).final_metric < 0.0;
    cfg.noise = false;
    without += nas::train_fixed(q, gnn::gcn_default(), cfg, opts).final_metric < 0.0;
  }
  return {with_noise >= 45 && without < 25, "M<0 with noise " + std::to_string(with_noise) +
                                                "/50 (need >=45), without " + std::to_string(without) +
                                                "/50 (need <25)"};
}

// ---- 6 ------------------------------------------------------------------

std::optional<std::filesystem::path> find_gset(const std::string& name) {
  std::vector<std::filesystem::path> dirs;
  if (const char* env = std::getenv("QNAS_GSET_DIR")) dirs.emplace_back(env);
  dirs.emplace_back(std::filesystem::path(QNAS_SOURCE_DIR) / "data" / "gset");
  for (const auto& d : dirs)
    for (const auto& f : {d / name, d / (name + ".txt"), d / (name + ".gset")})
      if (std::filesystem::exists(f)) return f;
  return std::nullopt;
}

Outcome ac6() {
  std::size_t seeds = 5;
  if (const char* env = std::getenv("QNAS_AC6_SEEDS")) seeds = std::clamp<std::size_t>(std::atoi(env), 1, 5);
  const double budget = 3600.0;
  struct Target {
    std::string name;
    double need;
    std::function<std::optional<Graph>(std::string&)> load;
  };
  std::vector<Target> targets{
      {"G14", 3000.0,
       [](std::string& src) -> std::optional<Graph> {
         auto p = find_gset("G14");
         if (!p) return std::nullopt;
         src = p->string();
         return load_gset(p->string());
       }},
      // Toroidal 2-D grids with unit weights, 3000 nodes and 6000 edges.
      {"G49", 6000.0, [](std::string& src) -> std::optional<Graph> {
         if (auto p = find_gset("G49")) {
           src = p->string();
           return load_gset(p->string());
         }
         src = "torus 100x30";
         return toroidal_grid(100, 30);
       }},
      {"G50", 5880.0, [](std::string& src) -> std::optional<Graph> {
         if (auto p = find_gset("G50")) {
           src = p->string();
           return load_gset(p->string());
         }
         src = "torus 25x120";
         return toroidal_grid(25, 120);
       }},
  };
  bool pass = true;
  std::string detail;
  for (auto& t : targets) {
    std::string src;
    auto g = t.load(src);
    if (!detail.empty()) detail += "; ";
    if (!g) {
      pass = false;
      detail += t.name + " missing (place it in data/gset/ or set QNAS_GSET_DIR)";
      continue;
    }
    auto q = qubo_from_maxcut(*g);
    const auto t0 = Clock::now();
    double best = 0.0, longest = 0.0;
    std::size_t ran = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
      if (ran > 0 && since(t0) + longest > budget) break;
      const auto ts = Clock::now();
      nas::SearchConfig cfg;
      cfg.seed = s;
      best = std::max(best, nas::search(q, cfg).objective);
      longest = std::max(longest, since(ts));
      ++ran;
      if (best >= t.need) break;
    }
    const double secs = since(t0);
    const double greedy = cut_value(*g, bench::baseline_greedy(*g, Task::maxcut()));
    const bool ok = best >= t.need && secs <= budget;
    pass = pass && ok;
    detail += t.name + " (" + src + ") best cut " + fmt(best, 6) + " need " + fmt(t.need, 6) + " over " +
              std::to_string(ran) + " seeds in " + fmt(secs, 4) + "s, greedy " + fmt(greedy, 6);
  }
  return {pass, detail};
}

// ---- 7 ------------------------------------------------------------------

Outcome ac7() {
  const auto t0 = Clock::now();
  double searched = 0.0, fixed = 0.0;
  std::size_t runs = 0;
  for (std::uint64_t gi = 0; gi < 20; ++gi) {
    auto g = gen_random(RandomGraphSpec::d_regular(100, 3, 7000 + gi));
    auto q = qubo_from_maxcut(g);
    for (std::uint64_t s = 0; s < 5; ++s) {
      nas::SearchConfig cfg;
      cfg.seed = s;
      searched += nas::search(q, cfg).objective;
      fixed += -nas::train_fixed(q, gnn::gcn_default(), cfg).hamiltonian;
      ++runs;
    }
  }
  searched /= static_cast<double>(runs);
  fixed /= static_cast<double>(runs);
  return {searched >= fixed, "mean cut searched " + fmt(searched, 6) + " vs fixed GCN " + fmt(fixed, 6) + " over " +
                                 std::to_string(runs) + " runs, " + fmt(since(t0), 4) + "s"};
}

// ---- 8 ------------------------------------------------------------------

Outcome ac8() {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto rng = make_rng(808);
  std::size_t mismatches = 0, variants = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const std::size_t rows = 3 + rng() % 30, cols = 2 + rng() % 60;
    const double density = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    auto m = gen_set_covering(rows, cols, density, i);
    if (i % 2 == 1) {
      // Variant with free and half-bounded continuous variables.
      ++variants;
      std::normal_distribution<double> nd(0.0, 10.0);
      for (std::size_t v = 0; v < m.num_vars; ++v) {
        switch (rng() % 4) {
          case 0: m.lower[v] = -kInf; break;
          case 1: m.upper[v] = kInf; break;
          case 2: m.lower[v] = -kInf; m.upper[v] = kInf; break;
          default: break;
        }
        m.integral[v] = rng() % 2;
        m.c[v] = nd(rng);
      }
    }
    mismatches += !bit_equal(decode_bipartite(encode_bipartite(m)), m);
  }
  auto big = encode_bipartite(gen_set_covering(10, 1000, 0.05, 1));
  const bool ok = mismatches == 0 && big.vars.size() == 1000;
  return {ok, std::to_string(mismatches) + "/1000 round-trip mismatches (" + std::to_string(variants) +
                  " with infinite bounds); 1000-column instance -> " + std::to_string(big.vars.size()) +
                  " variable nodes"};
}

// ---- 9 ------------------------------------------------------------------

Outcome ac9() {
  nas::HyperparameterSpace space;
  auto rng = make_rng(909);
  std::size_t outside = 0, early = 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    auto h = space.sample(rng);
    const bool in = space.contains(h) && h.learning_rate >= 1e-4 && h.learning_rate <= 0.1 && h.layers >= 2 &&
                    h.layers <= 6 && h.heads >= 1 && h.heads <= 32 && h.hidden >= 2 && h.hidden <= 512 &&
                    h.patience >= 3 && h.patience <= 7 && h.epochs <= 300 &&
                    (h.batch_size == 8 || h.batch_size == 16 || h.batch_size == 32);
    outside += !in;
    // A flat history is the fastest way to trigger the stopper; a noisy one
    // checks the same bound on a typical trajectory.
    for (int kind = 0; kind < 2; ++kind) {
      nas::EarlyStopper stop(h.patience, 1e-4);
      double level = 0.0;
      for (std::size_t epoch = 1; epoch <= h.epochs; ++epoch) {
        if (kind == 1) level -= u(rng) < 0.3 ? u(rng) : 0.0;
        if (stop.update(level)) {
          early += epoch <= h.patience;
          break;
        }
      }
    }
  }
  return {outside == 0 && early == 0, std::to_string(outside) + "/10000 samples outside the ranges; " +
                                          std::to_string(early) + " stops at or before `patience` epochs"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "error: usage: criterion numbers are 1.." << criteria.size() << "\n";
      return 1;
    }
    selected.push_back(k);
  }
  if (selected.empty())
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);
  bool all = true;
  for (int k : selected) {
    Outcome o;
    try {
      o = criteria[k - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "AC" << k << " " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
