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

#include "qnas/nas/hparams.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "qnas/error.hpp"

namespace qnas::nas {

namespace {

template <class T>
const T& choose(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

bool choose_bool(const std::vector<bool>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

template <class T>
bool in(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

void HyperparameterSpace::validate() const {
  if (initializers.empty() || batch_norm.empty() || optimizers.empty() || batch_sizes.empty() || two_hop.empty() ||
      activations.empty() || heads.empty() || hidden.empty())
    throw InvalidArgument("hyperparameter space has an empty choice list");
  if (!(lr_min > 0.0 && lr_min <= lr_max)) throw InvalidArgument("bad learning-rate range");
  if (epochs_min < 1 || epochs_min > epochs_max) throw InvalidArgument("bad epoch range");
  if (patience_min > patience_max) throw InvalidArgument("bad patience range");
  if (layers_min > layers_max) throw InvalidArgument("bad layer range");
  for (auto d : hidden)
    if (std::none_of(heads.begin(), heads.end(), [d](std::size_t h) { return d % h == 0; }))
      throw InvalidArgument("hidden size " + std::to_string(d) + " has no compatible head count");
}

Hyperparameters HyperparameterSpace::sample(Rng& rng) const {
  Hyperparameters h;
  h.init = choose(initializers, rng);
  std::uniform_real_distribution<double> lr(std::log(lr_min), std::log(lr_max));
  h.learning_rate = std::clamp(std::exp(lr(rng)), lr_min, lr_max);
  h.batch_norm = choose_bool(batch_norm, rng);
  h.optimizer = choose(optimizers, rng);
  h.epochs = std::uniform_int_distribution<std::size_t>(epochs_min, epochs_max)(rng);
  h.batch_size = choose(batch_sizes, rng);
  h.patience = std::uniform_int_distribution<std::size_t>(patience_min, patience_max)(rng);
  h.two_hop = choose_bool(two_hop, rng);
  h.activation = choose(activations, rng);
  h.layers = std::uniform_int_distribution<std::size_t>(layers_min, layers_max)(rng);
  h.hidden = choose(hidden, rng);
  std::vector<std::size_t> ok;
  for (auto k : heads)
    if (h.hidden % k == 0) ok.push_back(k);
  h.heads = choose(ok, rng);
  return h;
}

bool HyperparameterSpace::contains(const Hyperparameters& h) const {
  return in(initializers, h.init) && h.learning_rate >= lr_min && h.learning_rate <= lr_max &&
         in(batch_norm, h.batch_norm) && in(optimizers, h.optimizer) && h.epochs >= epochs_min &&
         h.epochs <= epochs_max && in(batch_sizes, h.batch_size) && h.patience >= patience_min &&
         h.patience <= patience_max && in(two_hop, h.two_hop) && in(activations, h.activation) &&
         in(heads, h.heads) && h.layers >= layers_min && h.layers <= layers_max && in(hidden, h.hidden) &&
         h.hidden % h.heads == 0;
}

SearchConfig apply(const SearchConfig& base, const Hyperparameters& h) {
  SearchConfig c = base;
  c.init = h.init;
  c.learning_rate = h.learning_rate;
  c.batch_norm = h.batch_norm;
  c.optimizer = h.optimizer;
  c.epochs = h.epochs;
  c.batch_size = h.batch_size;
  c.patience = h.patience;
  c.two_hop = h.two_hop;
  c.heads = h.heads;
  c.layers = h.layers;
  c.hidden = h.hidden;
  return c;
}

gnn::ArchSpec apply(const gnn::ArchSpec& arch, const Hyperparameters& h) {
  gnn::ArchSpec a = arch;
  if (a.layers.empty()) throw InvalidArgument("architecture has no layers");
  while (a.layers.size() > h.layers) a.layers.pop_back();
  while (a.layers.size() < h.layers) {
    auto l = a.layers.back();
    l.activation = h.activation;
    a.layers.push_back(l);
  }
  for (auto& l : a.layers) {
    l.hidden = h.hidden;
    l.heads = h.heads;
    l.two_hop = h.two_hop;
  }
  // Truncation may leave only ZERO skips behind.
  if (std::all_of(a.layers.begin(), a.layers.end(), [](const gnn::LayerSpec& l) { return l.skip == gnn::SkipOp::kZero; }))
    a.layers.back().skip = gnn::SkipOp::kIdentity;
  return a;
}

HyperparameterSearchResult hyperparameter_search(const QuboInstance& q, const HyperparameterSpace& space,
                                                 std::size_t budget, const SearchConfig& base, unsigned jobs) {
  if (budget < 1) throw InvalidArgument("hyperparameter budget must be at least 1");
  space.validate();
  HyperparameterSearchResult res;
  res.architecture_stage = search(q, base);

  res.points.resize(budget);
  res.trials.resize(budget);
  std::vector<std::string> errors(budget);
  std::vector<bool> ok(budget, false);
  for (std::size_t i = 0; i < budget; ++i) {
    auto rng = make_rng(derive_seed(base.seed, i + 1));
    res.points[i] = space.sample(rng);
  }

  auto run_trial = [&](std::size_t i) {
    const auto& h = res.points[i];
    auto cfg = apply(base, h);
    cfg.seed = derive_seed(base.seed, i + 1);
    auto arch = apply(res.architecture_stage.arch, h);
    TrialResult t;
    t.arch = arch;
    t.config = cfg;
    t.seed = cfg.seed;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      auto tr = train_fixed(q, arch, cfg);
      t.metric = tr.final_metric;
      t.hamiltonian = tr.hamiltonian;
      t.assignment = tr.assignment;
      t.epochs_run = tr.epochs_run;
      auto s = objective(q, tr.assignment);
      t.objective = s.value;
      t.valid = s.valid;
      t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ok[i] = true;
    } catch (const Error& e) {
      errors[i] = "trial " + std::to_string(i) + ": " + e.kind() + ": " + e.what();
    }
    res.trials[i] = std::move(t);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(budget)));
  if (workers == 1) {
    for (std::size_t i = 0; i < budget; ++i) run_trial(i);
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= budget) return;
            i = next++;
          }
          run_trial(i);
        }
      });
    for (auto& t : pool) t.join();
  }

  std::size_t best = budget;
  for (std::size_t i = 0; i < budget; ++i) {
    if (!ok[i]) {
      res.failures.push_back(errors[i]);
      continue;
    }
    if (best == budget || res.trials[i].hamiltonian < res.trials[best].hamiltonian) best = i;
  }
  if (best == budget) {
    std::string msg = "all " + std::to_string(budget) + " hyperparameter trials failed";
    for (const auto& e : res.failures) msg += "; " + e;
    throw NumericError(msg);
  }
  res.best = res.trials[best];
  return res;
}

}  // namespace qnas::nas
