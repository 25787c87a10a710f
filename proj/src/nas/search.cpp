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

#include "qnas/nas/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "qnas/ad/ops.hpp"
#include "qnas/error.hpp"

namespace qnas::nas {

using ad::Tensor;
using ad::Var;

void SearchConfig::validate() const {
  weight_optimizer().validate();
  arch_optimizer().validate();
  if (epochs < 1 || epochs > 300) throw InvalidArgument("epochs must lie in [1, 300]");
  if (batch_size != 8 && batch_size != 16 && batch_size != 32) throw InvalidArgument("batch size must be 8, 16 or 32");
  if (patience < 3 || patience > 7) throw InvalidArgument("patience must lie in [3, 7]");
  if (!(xi >= 0.0)) throw InvalidArgument("xi must be non-negative");
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be non-negative");
  if (!(sigma0 >= 0.0)) throw InvalidArgument("sigma0 must be non-negative");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
  if (!(stop_threshold >= 0.0)) throw InvalidArgument("stop threshold must be non-negative");
  if (!(decode_threshold > 0.0 && decode_threshold < 1.0)) throw InvalidArgument("decode threshold must lie in (0, 1)");
  gnn::NetworkSpec::supernet(shapes(), candidates, combine_candidates, batch_norm, init);
}

ad::OptimizerConfig SearchConfig::weight_optimizer() const {
  ad::OptimizerConfig c;
  c.kind = optimizer;
  c.learning_rate = learning_rate;
  c.weight_decay = optimizer == ad::OptimizerKind::kAdamW ? weight_decay : 0.0;
  return c;
}

ad::OptimizerConfig SearchConfig::arch_optimizer() const {
  ad::OptimizerConfig c;
  c.learning_rate = arch_learning_rate;
  return c;
}

std::vector<gnn::LayerShape> SearchConfig::shapes() const {
  return std::vector<gnn::LayerShape>(layers, gnn::LayerShape{hidden, heads, two_hop});
}

// ---- noise, annealing, early stopping ------------------------------------

NoisyLoss maybe_inject_noise(const QuboInstance& q, const Var& p, double delta, double sigma, Rng& rng) {
  const auto& pv = p.value().storage();
  auto qp = q.multiply(pv);
  double m = 0.0, g2 = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    m += pv[i] * qp[i];
    g2 += 4.0 * qp[i] * qp[i];
  }
  if (sigma > 0.0 && std::abs(m) <= delta && std::sqrt(g2) <= delta) {
    std::normal_distribution<double> nd(0.0, sigma);
    Tensor eps(p.rows(), p.cols());
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = nd(rng);
    return {relaxed_hamiltonian(q, ad::add(p, ad::constant(std::move(eps)))), true};
  }
  return {relaxed_hamiltonian(q, p), false};
}

double anneal(double sigma, double gamma) { return std::max(gamma * sigma, kSigmaFloor); }

bool strict_early_stop(const std::vector<double>& history, std::size_t patience, double threshold) {
  EarlyStopper s(patience, threshold);
  bool stop = false;
  for (double h : history) stop = s.update(h);
  return stop;
}

bool EarlyStopper::update(double loss) {
  if (!started_) {
    started_ = true;
    best_ = loss;
    since_ = 0;
  } else if (loss < best_ - threshold_) {
    best_ = loss;
    since_ = 0;
  } else {
    ++since_;
  }
  return since_ >= patience_;
}

// ---- bilevel -------------------------------------------------------------

namespace {

void require_finite(const Var& loss, const char* what) {
  if (!std::isfinite(loss.item()))
    throw NumericError(std::string(what) + " is not finite (" + std::to_string(loss.item()) + ")");
}

Tensor grad_or_zero(const Var& v) { return v.has_grad() ? v.grad() : Tensor(v.rows(), v.cols()); }

}  // namespace

BilevelStats bilevel_step(std::vector<Var>& w, std::vector<Var>& a, const std::function<Var()>& m_train,
                          const std::function<Var()>& m_val, double xi, ad::Optimizer& w_opt, ad::Optimizer& a_opt) {
  if (!(xi >= 0.0)) throw InvalidArgument("xi must be non-negative");
  auto zero_all = [&] {
    for (auto& v : w) v.zero_grad();
    for (auto& v : a) v.zero_grad();
  };
  BilevelStats st;
  zero_all();
  auto lt = m_train();
  require_finite(lt, "training loss");
  st.train_loss = lt.item();
  ad::backward(lt);
  std::vector<Tensor> gw, saved;
  for (auto& v : w) gw.push_back(grad_or_zero(v));

  for (std::size_t i = 0; i < w.size(); ++i) {
    saved.push_back(w[i].value());
    if (xi != 0.0) w[i].mutable_value().add_scaled(gw[i], -xi);
  }
  zero_all();
  auto lv = m_val();
  require_finite(lv, "validation loss");
  st.val_loss = lv.item();
  ad::backward(lv);
  for (auto& v : a) st.arch_grad.push_back(grad_or_zero(v));

  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i].mutable_value() = std::move(saved[i]);
    w[i].mutable_grad() = gw[i];
  }
  for (std::size_t i = 0; i < a.size(); ++i) a[i].mutable_grad() = st.arch_grad[i];
  w_opt.step();
  a_opt.step();
  return st;
}

// ---- training loop -------------------------------------------------------

BinaryAssignment decode(const QuboInstance& q, const SoftAssignment& p, double threshold) {
  const auto& g = q.source_graph();
  if (g && q.task().kind != TaskKind::kGeneric) return round_assignment(p, q.task(), *g, threshold);
  return round_assignment(p, threshold);
}

TaskScore objective(const QuboInstance& q, const BinaryAssignment& x) {
  const auto& g = q.source_graph();
  if (g && q.task().kind != TaskKind::kGeneric) return task_metric(*g, q.task(), x);
  return {hamiltonian(q, x), true};
}

namespace {

struct Instance {
  const QuboInstance* q = nullptr;
  gnn::GraphContext ctx;
  Var input;  // undefined: use the network's embedding table
};

struct LoopResult {
  std::vector<BinaryAssignment> best_x;  // per validation instance
  std::vector<double> best_h;
  double final_metric = 0.0;
  std::vector<double> history;
  std::size_t epochs_run = 0;
  std::size_t injections = 0;
};

Var forward(const gnn::Network& net, const Instance& in, gnn::ForwardMode mode) {
  return in.input.defined() ? net.forward(in.ctx, in.input, mode) : net.forward(in.ctx, mode);
}

std::size_t concat_slots_for(const std::vector<const Instance*>& all, bool two_hop) {
  std::size_t s = 1;
  for (const auto* in : all) s = std::max(s, in->ctx.hood(two_hop).sequence_len);
  return s;
}

// Trains `net` on `train`; with `search` set, each epoch is a bilevel step
// that also updates the architecture logits. When train and val are the same
// single instance (single-instance mode) the clean metric comes from the
// training forward pass.
LoopResult run(gnn::Network& net, std::vector<Instance>& train, std::vector<Instance>& val, const SearchConfig& cfg,
               bool search) {
  const bool single = &train == &val;
  const auto mode = search ? gnn::ForwardMode::kMixture : gnn::ForwardMode::kDiscrete;
  auto noise_rng = make_rng(derive_seed(cfg.seed, search ? 11 : 12));
  auto batch_rng = make_rng(derive_seed(cfg.seed, search ? 13 : 14));
  double sigma = cfg.sigma0;

  LoopResult r;
  r.best_x.resize(val.size());
  r.best_h.assign(val.size(), std::numeric_limits<double>::infinity());
  auto consider = [&](std::size_t i, const SoftAssignment& p) {
    auto x = decode(*val[i].q, p, cfg.decode_threshold);
    double h = hamiltonian(*val[i].q, x);
    if (h < r.best_h[i]) {
      r.best_h[i] = h;
      r.best_x[i] = std::move(x);
    }
  };
  // Clean metric on validation instances plus decoding; returns mean M.
  auto evaluate_val = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < val.size(); ++i) {
      auto p = forward(net, val[i], mode);
      total += hamiltonian(*val[i].q, p.value().storage());
      consider(i, p.value().storage());
    }
    return total / static_cast<double>(val.size());
  };

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  auto next_batch = [&] {
    std::vector<std::size_t> b;
    const std::size_t k = std::min(cfg.batch_size, train.size());
    while (b.size() < k) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), batch_rng);
        cursor = 0;
      }
      b.push_back(order[cursor++]);
    }
    return b;
  };

  auto w = net.weights().all();
  auto a = net.arch().all();
  ad::Optimizer w_opt(w, cfg.weight_optimizer());
  ad::Optimizer a_opt(a, cfg.arch_optimizer());
  EarlyStopper stopper(cfg.patience, cfg.stop_threshold);
  // Single-instance mode decodes the pre-step output inside m_train; do the
  // same for validation instances so both modes see the initial network.
  if (!single) evaluate_val();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto batch = next_batch();
    double clean = 0.0;
    auto m_train = [&] {
      Var total;
      clean = 0.0;
      for (auto i : batch) {
        auto p = forward(net, train[i], mode);
        const auto& pv = p.value().storage();
        clean += hamiltonian(*train[i].q, pv);
        if (single) consider(i, pv);
        Var li;
        if (cfg.noise) {
          auto nl = maybe_inject_noise(*train[i].q, p, cfg.delta, sigma, noise_rng);
          r.injections += nl.injected;
          li = nl.loss;
        } else {
          li = relaxed_hamiltonian(*train[i].q, p);
        }
        total = total.defined() ? ad::add(total, li) : li;
      }
      clean /= static_cast<double>(batch.size());
      return batch.size() == 1 ? total : ad::scale(total, 1.0 / static_cast<double>(batch.size()));
    };
    auto m_val = [&] {
      Var total;
      for (auto& in : val) {
        auto li = relaxed_hamiltonian(*in.q, forward(net, in, mode));
        total = total.defined() ? ad::add(total, li) : li;
      }
      return val.size() == 1 ? total : ad::scale(total, 1.0 / static_cast<double>(val.size()));
    };

    if (search) {
      bilevel_step(w, a, m_train, m_val, cfg.xi, w_opt, a_opt);
    } else {
      w_opt.zero_grad();
      auto loss = m_train();
      require_finite(loss, "training loss");
      ad::backward(loss);
      w_opt.step();
    }
    const double metric = single ? clean : (search ? clean : evaluate_val());
    r.history.push_back(metric);
    r.epochs_run = epoch + 1;
    if (stopper.update(metric) && (!search || cfg.early_stop_search)) break;
    sigma = anneal(sigma, cfg.gamma);
  }
  r.final_metric = evaluate_val();
  return r;
}

Instance make_instance(const QuboInstance& q, bool two_hop) {
  Instance in;
  in.q = &q;
  in.ctx = gnn::make_context(*q.interaction_graph(), two_hop);
  return in;
}

void make_symmetric(gnn::Network& net) {
  auto& e = net.weights().get("embedding").mutable_value();
  for (std::size_t r = 1; r < e.rows(); ++r)
    for (std::size_t c = 0; c < e.cols(); ++c) e(r, c) = e(0, c);
}

bool arch_two_hop(const gnn::ArchSpec& a) {
  return std::any_of(a.layers.begin(), a.layers.end(), [](const gnn::LayerSpec& l) { return l.two_hop; });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrainResult train_fixed(const QuboInstance& q, const gnn::ArchSpec& arch, const SearchConfig& cfg,
                        const TrainOptions& opts) {
  cfg.validate();
  arch.validate();
  std::vector<Instance> one{make_instance(q, arch_two_hop(arch))};
  gnn::Network net(gnn::NetworkSpec::fixed(arch, cfg.batch_norm, cfg.init), concat_slots_for({&one[0]}, arch_two_hop(arch)),
                   derive_seed(cfg.seed, 2));
  net.add_embedding(q.size());
  if (opts.symmetric_init) make_symmetric(net);
  auto r = run(net, one, one, cfg, false);
  TrainResult t;
  t.assignment = r.best_x[0];
  t.hamiltonian = r.best_h[0];
  t.final_metric = r.final_metric;
  t.history = std::move(r.history);
  t.epochs_run = r.epochs_run;
  t.noise_injections = r.injections;
  return t;
}

TrialResult search(const QuboInstance& q, const SearchConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Instance> one{make_instance(q, cfg.two_hop)};
  gnn::Network sn(gnn::NetworkSpec::supernet(cfg.shapes(), cfg.candidates, cfg.combine_candidates, cfg.batch_norm,
                                             cfg.init),
                  concat_slots_for({&one[0]}, cfg.two_hop), derive_seed(cfg.seed, 1));
  sn.add_embedding(q.size());
  auto sr = run(sn, one, one, cfg, true);

  TrialResult out;
  out.arch = sn.derive();
  out.config = cfg;
  out.seed = cfg.seed;
  auto tr = train_fixed(q, out.arch, cfg);
  out.metric = tr.final_metric;
  out.epochs_run = tr.epochs_run;
  // Keep the better of the supernet's and the retrained model's decodings.
  out.assignment = tr.hamiltonian <= sr.best_h[0] ? tr.assignment : sr.best_x[0];
  out.hamiltonian = std::min(tr.hamiltonian, sr.best_h[0]);
  auto score = objective(q, out.assignment);
  out.objective = score.value;
  out.valid = score.valid;
  out.seconds = seconds_since(t0);
  return out;
}

TrialResult search(const std::vector<QuboInstance>& train, const std::vector<QuboInstance>& val,
                   const SearchConfig& cfg) {
  cfg.validate();
  if (train.empty() || val.empty()) throw InvalidArgument("distribution mode needs training and validation instances");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t d = cfg.hidden;
  auto build = [&](bool two_hop) {
    std::vector<Instance> tr, va;
    std::size_t idx = 0;
    auto features = [&](const QuboInstance& q) {
      auto rng = make_rng(derive_seed(cfg.seed, 1000 + idx++));
      const double b = gnn::init_bound(cfg.init, d, d);
      std::uniform_real_distribution<double> u(-b, b);
      Tensor f(q.size(), d);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
      return ad::constant(std::move(f));
    };
    for (const auto& q : train) {
      tr.push_back(make_instance(q, two_hop));
      tr.back().input = features(q);
    }
    for (const auto& q : val) {
      va.push_back(make_instance(q, two_hop));
      va.back().input = features(q);
    }
    return std::pair{std::move(tr), std::move(va)};
  };
  auto slots = [](const std::vector<Instance>& a, const std::vector<Instance>& b, bool two_hop) {
    std::vector<const Instance*> all;
    for (const auto& x : a) all.push_back(&x);
    for (const auto& x : b) all.push_back(&x);
    return concat_slots_for(all, two_hop);
  };

  auto [tr, va] = build(cfg.two_hop);
  gnn::Network sn(gnn::NetworkSpec::supernet(cfg.shapes(), cfg.candidates, cfg.combine_candidates, cfg.batch_norm,
                                             cfg.init),
                  slots(tr, va, cfg.two_hop), derive_seed(cfg.seed, 1));
  run(sn, tr, va, cfg, true);

  TrialResult out;
  out.arch = sn.derive();
  out.config = cfg;
  out.seed = cfg.seed;
  gnn::Network net(gnn::NetworkSpec::fixed(out.arch, cfg.batch_norm, cfg.init), slots(tr, va, cfg.two_hop),
                   derive_seed(cfg.seed, 2));
  auto r = run(net, tr, va, cfg, false);
  out.metric = r.final_metric;
  out.epochs_run = r.epochs_run;
  double h = 0.0, obj = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    h += r.best_h[i];
    auto s = objective(val[i], r.best_x[i]);
    obj += s.value;
    out.valid = out.valid && s.valid;
  }
  out.hamiltonian = h / static_cast<double>(va.size());
  out.objective = obj / static_cast<double>(va.size());
  out.seconds = seconds_since(t0);
  return out;
}

}  // namespace qnas::nas
