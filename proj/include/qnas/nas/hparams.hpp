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

#include "qnas/nas/search.hpp"

namespace qnas::nas {

struct Hyperparameters {
  gnn::Initializer init = gnn::Initializer::kXavier;
  double learning_rate = 0.01;
  bool batch_norm = false;
  ad::OptimizerKind optimizer = ad::OptimizerKind::kAdam;
  std::size_t epochs = 300;
  std::size_t batch_size = 8;
  std::size_t patience = 5;
  bool two_hop = false;
  gnn::Activation activation = gnn::Activation::kRelu;
  std::size_t heads = 1;
  std::size_t layers = 2;
  std::size_t hidden = 32;
};

// Ranges default to the hyperparameter table. Learning rates are drawn
// log-uniformly. Heads are drawn from the allowed counts that divide the
// sampled hidden size, so no sampled point violates divisibility.
struct HyperparameterSpace {
  std::vector<gnn::Initializer> initializers{gnn::Initializer::kXavier, gnn::Initializer::kKaiming,
                                             gnn::Initializer::kUniform};
  double lr_min = ad::kMinLearningRate;
  double lr_max = ad::kMaxLearningRate;
  std::vector<bool> batch_norm{false, true};
  std::vector<ad::OptimizerKind> optimizers{ad::OptimizerKind::kAdam, ad::OptimizerKind::kAdamW};
  std::size_t epochs_min = 2;
  std::size_t epochs_max = 300;
  std::vector<std::size_t> batch_sizes{8, 16, 32};
  std::size_t patience_min = 3;
  std::size_t patience_max = 7;
  std::vector<bool> two_hop{false, true};
  std::vector<gnn::Activation> activations{gnn::kAllActivation.begin(), gnn::kAllActivation.end()};
  std::vector<std::size_t> heads{gnn::kAllowedHeads.begin(), gnn::kAllowedHeads.end()};
  std::size_t layers_min = gnn::kMinLayers;
  std::size_t layers_max = gnn::kMaxLayers;
  std::vector<std::size_t> hidden{2, 4, 8, 16, 32, 64, 128, 256, 512};

  Hyperparameters sample(Rng& rng) const;
  bool contains(const Hyperparameters& h) const;
  void validate() const;
};

// Copies the table knobs of `h` into a search configuration.
SearchConfig apply(const SearchConfig& base, const Hyperparameters& h);

// Resizes `arch` to h.layers (repeating the last layer, whose activation is
// replaced by h.activation for added layers) and sets hidden, heads and
// two_hop on every layer.
gnn::ArchSpec apply(const gnn::ArchSpec& arch, const Hyperparameters& h);

struct HyperparameterSearchResult {
  TrialResult best;
  TrialResult architecture_stage;
  std::vector<TrialResult> trials;       // stage-2 trials in index order
  std::vector<std::string> failures;     // diagnostics of diverged trials
  std::vector<Hyperparameters> points;   // sampled point per trial
};

// Stage 1 searches an architecture with the base configuration. Stage 2
// samples `budget` points (trial i uses seed derive_seed(master, i + 1)),
// retrains the derived architecture under each and keeps the lowest decoded
// Hamiltonian, ties to the lower index. `jobs` bounds concurrent trials.
HyperparameterSearchResult hyperparameter_search(const QuboInstance& q, const HyperparameterSpace& space,
                                                 std::size_t budget, const SearchConfig& base, unsigned jobs = 1);

}  // namespace qnas::nas
