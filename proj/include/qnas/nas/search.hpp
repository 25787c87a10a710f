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
#include <functional>
#include <string>
#include <vector>

#include "qnas/ad/optim.hpp"
#include "qnas/gnn/network.hpp"
#include "qnas/qubo.hpp"
#include "qnas/rng.hpp"

namespace qnas::nas {

struct SearchConfig {
  // Knobs from the hyperparameter table.
  gnn::Initializer init = gnn::Initializer::kXavier;
  double learning_rate = 0.01;
  bool batch_norm = false;
  ad::OptimizerKind optimizer = ad::OptimizerKind::kAdam;
  std::size_t epochs = 300;
  std::size_t batch_size = 8;
  std::size_t patience = 5;
  bool two_hop = false;
  std::size_t heads = 1;
  std::size_t layers = 2;
  std::size_t hidden = 32;

  // Search and training controls.
  double weight_decay = 0.01;  // AdamW only
  double arch_learning_rate = 3e-3;
  double xi = 0.01;  // inner step of the unrolled architecture gradient
  bool noise = true;
  double delta = 1e-3;
  double sigma0 = 1.0;
  double gamma = 0.95;
  double stop_threshold = 1e-4;
  // Apply strict early stopping to the supernet phase as well as to training.
  bool early_stop_search = true;
  double decode_threshold = 0.5;
  std::uint64_t seed = 0;

  gnn::LayerCandidates candidates = gnn::LayerCandidates::full();
  std::vector<gnn::CombineOp> combine_candidates{gnn::CombineOp::kAvg, gnn::CombineOp::kConcat};

  void validate() const;
  ad::OptimizerConfig weight_optimizer() const;
  ad::OptimizerConfig arch_optimizer() const;
  std::vector<gnn::LayerShape> shapes() const;
};

// JSON object whose keys are the field names above; candidate lists are
// arrays of op names. Unknown keys are rejected.
SearchConfig parse_search_config(const std::string& json_text);
std::string write_search_config(const SearchConfig& cfg);

// ---- noise injection and annealing ---------------------------------------

inline constexpr double kSigmaFloor = 1e-6;

struct NoisyLoss {
  ad::Var loss;
  bool injected = false;
};

// If |M(p)| <= delta and |grad M(p)| = |2Qp| <= delta, returns M(p + eps)
// with eps ~ N(0, sigma^2) i.i.d. drawn from `rng`; otherwise M(p).
NoisyLoss maybe_inject_noise(const QuboInstance& q, const ad::Var& p, double delta, double sigma, Rng& rng);

// max(gamma * sigma, 1e-6).
double anneal(double sigma, double gamma);

// ---- strict early stopping -----------------------------------------------

// True iff the running best has not improved by more than `threshold` for
// the last `patience` entries.
bool strict_early_stop(const std::vector<double>& history, std::size_t patience, double threshold);

class EarlyStopper {
 public:
  EarlyStopper(std::size_t patience, double threshold) : patience_(patience), threshold_(threshold) {}
  // Records one epoch; returns true once training should stop.
  bool update(double loss);
  double best() const noexcept { return best_; }

 private:
  std::size_t patience_;
  double threshold_;
  double best_ = 0.0;
  std::size_t since_ = 0;
  bool started_ = false;
};

// ---- bilevel step --------------------------------------------------------

struct BilevelStats {
  double train_loss = 0.0;
  double val_loss = 0.0;      // M_val at the look-ahead weights
  std::vector<ad::Tensor> arch_grad;  // gradient applied to each arch param
};

// One architecture/weight update, first order in the look-ahead:
//   g_w = dM_train/dw at (w, a)
//   g_a = dM_val/da at (w - xi g_w, a), with w' treated as constant in a
// then w descends g_w and a descends g_a. Throws NumericError on a
// non-finite loss.
BilevelStats bilevel_step(std::vector<ad::Var>& w, std::vector<ad::Var>& a, const std::function<ad::Var()>& m_train,
                          const std::function<ad::Var()>& m_val, double xi, ad::Optimizer& w_opt,
                          ad::Optimizer& a_opt);

// ---- training and search -------------------------------------------------

struct TrainOptions {
  // Every embedding row starts equal to the first one. On MaxCut the output
  // is then uniform and Q 1 = 0, an exact stationary point.
  bool symmetric_init = false;
};

struct TrainResult {
  BinaryAssignment assignment;   // best decoded assignment seen
  double hamiltonian = 0.0;      // x^T Q x of `assignment`
  double final_metric = 0.0;     // relaxed M at the last epoch
  std::vector<double> history;   // relaxed M per epoch
  std::size_t epochs_run = 0;
  std::size_t noise_injections = 0;
};

// Decoded assignment and its Hamiltonian for soft outputs p.
BinaryAssignment decode(const QuboInstance& q, const SoftAssignment& p, double threshold);

// Trains a fixed architecture on one instance from a learnable embedding.
TrainResult train_fixed(const QuboInstance& q, const gnn::ArchSpec& arch, const SearchConfig& cfg,
                        const TrainOptions& opts = {});

struct TrialResult {
  gnn::ArchSpec arch;
  SearchConfig config;
  double metric = 0.0;       // relaxed M of the retrained model (mean over instances in distribution mode)
  double hamiltonian = 0.0;  // H of the decoded assignment (mean in distribution mode)
  double objective = 0.0;    // cut size / set size / H for generic QUBOs (mean in distribution mode)
  bool valid = true;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  BinaryAssignment assignment;  // single-instance mode only
};

std::string trial_to_json(const TrialResult& t);
TrialResult trial_from_json(const std::string& text);

// Task objective of a decoded assignment (cut, set size, or H).
TaskScore objective(const QuboInstance& q, const BinaryAssignment& x);

// Single-instance mode: M_val = M_train on the same Hamiltonian. Searches a
// supernet, derives the argmax architecture and retrains it from scratch.
TrialResult search(const QuboInstance& q, const SearchConfig& cfg);

// Distribution mode: weights are shared across instances; each instance gets
// frozen random input features drawn from its own seed. M_train averages a
// batch of training instances, M_val averages the validation instances.
TrialResult search(const std::vector<QuboInstance>& train, const std::vector<QuboInstance>& val,
                   const SearchConfig& cfg);

}  // namespace qnas::nas
