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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qnas/ad/ops.hpp"

namespace qnas::gnn {

// Candidate lists in declaration order; derivation breaks ties toward the
// lowest index, so the order here is part of the contract.
enum class AttentionOp { kConst, kGcn, kGat, kGatSym, kGatCos, kGatLinear, kGatGenLinear, kSageMean, kSageMax, kGin };
enum class Aggregation { kSum, kMax, kMean, kConcat, kRnn, kLstm };
enum class SkipOp { kIdentity, kZero, kStack, kSkipSum, kSkipCat };
enum class CombineOp { kAvg, kConcat };
using ad::Activation;

inline constexpr std::array kAllAttention = {
    AttentionOp::kConst,  AttentionOp::kGcn,        AttentionOp::kGat,          AttentionOp::kGatSym,
    AttentionOp::kGatCos, AttentionOp::kGatLinear,  AttentionOp::kGatGenLinear, AttentionOp::kSageMean,
    AttentionOp::kSageMax, AttentionOp::kGin};
inline constexpr std::array kAllAggregation = {Aggregation::kSum,    Aggregation::kMax, Aggregation::kMean,
                                               Aggregation::kConcat, Aggregation::kRnn, Aggregation::kLstm};
inline constexpr std::array kAllActivation = {Activation::kSigmoid, Activation::kTanh,      Activation::kRelu,
                                              Activation::kLinear,  Activation::kLeakyRelu, Activation::kElu};
inline constexpr std::array kAllSkip = {SkipOp::kIdentity, SkipOp::kZero, SkipOp::kStack, SkipOp::kSkipSum,
                                        SkipOp::kSkipCat};
inline constexpr std::array kAllCombine = {CombineOp::kAvg, CombineOp::kConcat};

inline constexpr std::array<std::size_t, 7> kAllowedHeads = {1, 2, 4, 6, 8, 16, 32};
inline constexpr std::size_t kMinHidden = 2;
inline constexpr std::size_t kMaxHidden = 512;
inline constexpr std::size_t kMinLayers = 2;
inline constexpr std::size_t kMaxLayers = 6;

// GAT-family ops learn per-edge scores and are the only multi-head ops.
bool is_attention_family(AttentionOp op);

std::string name(AttentionOp op);
std::string name(Aggregation op);
std::string name(Activation op);
std::string name(SkipOp op);
std::string name(CombineOp op);

// Case-insensitive; accepts the table spellings CNN, GraphSAGE-MEAN,
// GraphSAGE-MAX, SIGMOD, THAN and the short forms MAX / MEAN.
AttentionOp parse_attention(const std::string& s);
Aggregation parse_aggregation(const std::string& s);
Activation parse_activation(const std::string& s);
SkipOp parse_skip(const std::string& s);
CombineOp parse_combine(const std::string& s);

struct LayerSpec {
  AttentionOp attention = AttentionOp::kGcn;
  Aggregation aggregation = Aggregation::kSum;
  Activation activation = Activation::kRelu;
  std::size_t heads = 1;
  std::size_t hidden = 32;
  bool two_hop = false;
  SkipOp skip = SkipOp::kIdentity;
  bool operator==(const LayerSpec&) const = default;
};

struct ArchSpec {
  std::vector<LayerSpec> layers;
  CombineOp combine = CombineOp::kAvg;
  bool operator==(const ArchSpec&) const = default;

  // Layer count, heads and hidden sizes within range, hidden divisible by
  // heads for GAT-family ops, at least one non-ZERO skip.
  void validate() const;
  // Width of the node embedding table feeding the first layer.
  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().hidden; }
};

// Two GCN layers (SUM, RELU, 32 wide), identity skips, AVG combine.
ArchSpec gcn_default();

// Width of the embedding fed to the output head.
std::size_t combine_width(const ArchSpec& arch);

// Text format:
//   qnas-arch v1
//   layers <L>
//   combine <AVG|CONCAT>
//   layer <i> attention=<op> aggregation=<op> activation=<op> heads=<k> hidden=<d> two_hop=<true|false> skip=<op>
std::string write_arch(const ArchSpec& arch);
ArchSpec parse_arch(const std::string& text);
// `gcn_default` or a path to an arch file.
ArchSpec load_arch(const std::string& name_or_path);

enum class Initializer { kXavier, kKaiming, kUniform };
std::string name(Initializer init);
Initializer parse_initializer(const std::string& s);

}  // namespace qnas::gnn
