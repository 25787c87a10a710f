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

#include "qnas/ad/optim.hpp"
#include "qnas/gnn/arch.hpp"
#include "qnas/gnn/context.hpp"
#include "qnas/rng.hpp"

namespace qnas::gnn {

// Non-searched per-layer settings.
struct LayerShape {
  std::size_t hidden = 32;
  std::size_t heads = 1;
  bool two_hop = false;
  bool operator==(const LayerShape&) const = default;
};

struct LayerCandidates {
  std::vector<AttentionOp> attention;
  std::vector<Aggregation> aggregation;
  std::vector<Activation> activation;
  std::vector<SkipOp> skip;
  static LayerCandidates full();
};

// Candidate lists per slot. A fixed architecture is the case where every
// list holds exactly one entry.
struct NetworkSpec {
  std::vector<LayerShape> shapes;
  std::vector<LayerCandidates> slots;
  std::vector<CombineOp> combine;
  bool batch_norm = false;
  Initializer init = Initializer::kXavier;

  static NetworkSpec fixed(const ArchSpec& arch, bool batch_norm = false, Initializer init = Initializer::kXavier);
  static NetworkSpec supernet(const std::vector<LayerShape>& shapes,
                              const LayerCandidates& candidates = LayerCandidates::full(),
                              std::vector<CombineOp> combine = {CombineOp::kAvg, CombineOp::kConcat},
                              bool batch_norm = false, Initializer init = Initializer::kXavier);

  void validate() const;
  bool needs_two_hop() const;
  bool is_fixed() const;
  std::size_t input_dim() const { return shapes.empty() ? 0 : shapes.front().hidden; }
};

// kMixture weights every candidate by softmax of its slot's logits. kDiscrete
// evaluates only the argmax candidate of each slot (lowest index on ties).
enum class ForwardMode { kMixture, kDiscrete };

// Uniform bound: Xavier sqrt(6/(in+out)), Kaiming sqrt(6/in), Uniform 1/sqrt(in).
double init_bound(Initializer init, std::size_t fan_in, std::size_t fan_out);
ad::Tensor init_tensor(Initializer init, std::size_t rows, std::size_t cols, Rng& rng);

// Message-passing network over the slot candidates of a NetworkSpec.
//
// Weights are named by slot and candidate, for example "layer0.att.GCN.W",
// "layer1.agg.LSTM.wx" or "combine.AVG.head.W", so a fixed network and a
// supernet containing the same candidates share parameter names. Each
// parameter is drawn from a stream derived from (seed, name), which makes
// initial values independent of construction order.
class Network {
 public:
  // `concat_slots` sizes the CONCAT aggregator and is ignored otherwise.
  Network(NetworkSpec spec, std::size_t concat_slots, std::uint64_t seed);

  // Adds the learnable n x input_dim node embedding table "embedding".
  ad::Var& add_embedding(std::size_t num_nodes);
  bool has_embedding() const { return weights_.contains("embedding"); }
  const ad::Var& embedding() const { return weights_.get("embedding"); }

  // p in (0,1)^n as an n x 1 Var. `input` is n x input_dim.
  ad::Var forward(const GraphContext& ctx, const ad::Var& input, ForwardMode mode = ForwardMode::kMixture) const;
  // Forward from the embedding table.
  ad::Var forward(const GraphContext& ctx, ForwardMode mode = ForwardMode::kMixture) const;

  ad::ParamStore& weights() noexcept { return weights_; }
  const ad::ParamStore& weights() const noexcept { return weights_; }
  // One 1 x k logit row per slot: "alpha.layer<i>.attention|aggregation|
  // activation|skip" and "alpha.combine".
  ad::ParamStore& arch() noexcept { return arch_; }
  const ad::ParamStore& arch() const noexcept { return arch_; }

  const NetworkSpec& spec() const noexcept { return spec_; }
  std::size_t concat_slots() const noexcept { return concat_slots_; }

  // Per-slot argmax. If every skip comes out ZERO, the last layer's skip is
  // replaced by its best non-ZERO candidate so the result stays valid.
  ArchSpec derive() const;

 private:
  struct Message {
    ad::Var messages;
    ad::Var self;
  };

  ad::Var& make(const std::string& name, std::size_t rows, std::size_t cols, bool zero = false);
  Message attention_candidate(std::size_t layer, AttentionOp op, const ad::Var& h, const Neighborhood& nb) const;
  ad::Var aggregation_candidate(std::size_t layer, Aggregation op, const ad::Var& messages,
                                const Neighborhood& nb) const;
  ad::Var skip_candidate(std::size_t layer, SkipOp op, const std::vector<ad::Var>& states) const;
  ad::Var combine_candidate(CombineOp op, const std::vector<ad::Var>& retained,
                            const std::vector<std::size_t>& retained_layers) const;
  bool layer_retained(std::size_t layer) const;
  const ad::Var* maybe(const std::string& name) const;

  NetworkSpec spec_;
  std::size_t concat_slots_;
  std::uint64_t seed_;
  ad::ParamStore weights_;
  ad::ParamStore arch_;
};

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_first(const ad::Tensor& row);

}  // namespace qnas::gnn
