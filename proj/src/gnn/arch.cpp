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

#include "qnas/gnn/arch.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "qnas/error.hpp"
#include "qnas/textio.hpp"

namespace qnas::gnn {

namespace {

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

template <class Enum, std::size_t N>
Enum parse_enum(const std::string& s, const std::array<Enum, N>& all, const char* what,
                std::initializer_list<std::pair<const char*, Enum>> aliases = {}) {
  auto u = upper(s);
  for (auto e : all)
    if (upper(name(e)) == u) return e;
  for (const auto& [alias, e] : aliases)
    if (upper(alias) == u) return e;
  throw InvalidArgument(std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace

bool is_attention_family(AttentionOp op) {
  switch (op) {
    case AttentionOp::kGat:
    case AttentionOp::kGatSym:
    case AttentionOp::kGatCos:
    case AttentionOp::kGatLinear:
    case AttentionOp::kGatGenLinear:
      return true;
    default:
      return false;
  }
}

std::string name(AttentionOp op) {
  switch (op) {
    case AttentionOp::kConst: return "CONST";
    case AttentionOp::kGcn: return "GCN";
    case AttentionOp::kGat: return "GAT";
    case AttentionOp::kGatSym: return "GAT-SYM";
    case AttentionOp::kGatCos: return "GAT-COS";
    case AttentionOp::kGatLinear: return "GAT-LINEAR";
    case AttentionOp::kGatGenLinear: return "GAT-GEN-LINEAR";
    case AttentionOp::kSageMean: return "SAGE-MEAN";
    case AttentionOp::kSageMax: return "SAGE-MAX";
    case AttentionOp::kGin: return "GIN";
  }
  return "?";
}

std::string name(Aggregation op) {
  switch (op) {
    case Aggregation::kSum: return "SUM";
    case Aggregation::kMax: return "MAX-POOLING";
    case Aggregation::kMean: return "MEAN-POOLING";
    case Aggregation::kConcat: return "CONCAT";
    case Aggregation::kRnn: return "RNN";
    case Aggregation::kLstm: return "LSTM";
  }
  return "?";
}

std::string name(Activation op) {
  switch (op) {
    case Activation::kSigmoid: return "SIGMOID";
    case Activation::kTanh: return "TANH";
    case Activation::kRelu: return "RELU";
    case Activation::kLinear: return "LINEAR";
    case Activation::kLeakyRelu: return "LEAKY-RELU";
    case Activation::kElu: return "ELU";
  }
  return "?";
}

std::string name(SkipOp op) {
  switch (op) {
    case SkipOp::kIdentity: return "IDENTITY";
    case SkipOp::kZero: return "ZERO";
    case SkipOp::kStack: return "STACK";
    case SkipOp::kSkipSum: return "SKIP-SUM";
    case SkipOp::kSkipCat: return "SKIP-CAT";
  }
  return "?";
}

std::string name(CombineOp op) { return op == CombineOp::kAvg ? "AVG" : "CONCAT"; }

AttentionOp parse_attention(const std::string& s) {
  return parse_enum(s, kAllAttention, "attention op",
                    {{"CNN", AttentionOp::kConst},
                     {"GraphSAGE-MEAN", AttentionOp::kSageMean},
                     {"GraphSAGE-MAX", AttentionOp::kSageMax}});
}

Aggregation parse_aggregation(const std::string& s) {
  return parse_enum(s, kAllAggregation, "aggregation", {{"MAX", Aggregation::kMax}, {"MEAN", Aggregation::kMean}});
}

Activation parse_activation(const std::string& s) {
  return parse_enum(s, kAllActivation, "activation", {{"SIGMOD", Activation::kSigmoid}, {"THAN", Activation::kTanh}});
}

SkipOp parse_skip(const std::string& s) { return parse_enum(s, kAllSkip, "skip op"); }
CombineOp parse_combine(const std::string& s) { return parse_enum(s, kAllCombine, "combine op"); }

void ArchSpec::validate() const {
  if (layers.size() < kMinLayers || layers.size() > kMaxLayers)
    throw InvalidArgument("architecture needs " + std::to_string(kMinLayers) + ".." + std::to_string(kMaxLayers) +
                          " layers, got " + std::to_string(layers.size()));
  bool any_kept = false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const auto where = "layer " + std::to_string(i) + ": ";
    if (l.hidden < kMinHidden || l.hidden > kMaxHidden)
      throw InvalidArgument(where + "hidden size " + std::to_string(l.hidden) + " outside [2, 512]");
    if (std::find(kAllowedHeads.begin(), kAllowedHeads.end(), l.heads) == kAllowedHeads.end())
      throw InvalidArgument(where + "heads " + std::to_string(l.heads) + " not in {1,2,4,6,8,16,32}");
    if (is_attention_family(l.attention) && l.hidden % l.heads != 0)
      throw InvalidArgument(where + "hidden size " + std::to_string(l.hidden) + " not divisible by " +
                            std::to_string(l.heads) + " heads");
    any_kept = any_kept || l.skip != SkipOp::kZero;
  }
  if (!any_kept) throw InvalidArgument("every skip is ZERO: no layer output survives to the combine step");
}

ArchSpec gcn_default() {
  ArchSpec a;
  a.layers.assign(2, LayerSpec{});
  return a;
}

std::size_t combine_width(const ArchSpec& arch) {
  if (arch.combine == CombineOp::kAvg) return arch.layers.back().hidden;
  std::size_t w = 0;
  for (const auto& l : arch.layers)
    if (l.skip != SkipOp::kZero) w += l.hidden;
  return w;
}

std::string write_arch(const ArchSpec& arch) {
  std::string out = "qnas-arch v1\nlayers " + std::to_string(arch.layers.size()) + "\ncombine " + name(arch.combine) +
                    "\n";
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const auto& l = arch.layers[i];
    out += "layer " + std::to_string(i) + " attention=" + name(l.attention) + " aggregation=" + name(l.aggregation) +
           " activation=" + name(l.activation) + " heads=" + std::to_string(l.heads) +
           " hidden=" + std::to_string(l.hidden) + " two_hop=" + (l.two_hop ? "true" : "false") +
           " skip=" + name(l.skip) + "\n";
  }
  return out;
}

ArchSpec parse_arch(const std::string& text) {
  auto lines = textio::split_lines(text);
  std::size_t li = 0;
  auto next = [&](const char* what) {
    while (li < lines.size() && textio::split_ws(lines[li]).empty()) ++li;
    if (li >= lines.size()) throw ParseError(std::string("expected ") + what, li + 1);
    return textio::split_ws(lines[li++]);
  };
  auto head = next("header");
  if (head.size() != 2 || head[0] != "qnas-arch" || head[1] != "v1")
    throw ParseError("expected \"qnas-arch v1\"", li);
  auto lt = next("layers line");
  std::size_t count = 0;
  if (lt.size() != 2 || lt[0] != "layers" || !textio::parse_int(lt[1], count)) throw ParseError("expected \"layers <L>\"", li);
  auto ct = next("combine line");
  if (ct.size() != 2 || ct[0] != "combine") throw ParseError("expected \"combine <op>\"", li);
  ArchSpec arch;
  try {
    arch.combine = parse_combine(std::string(ct[1]));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), li);
  }
  for (std::size_t i = 0; i < count; ++i) {
    auto tok = next("layer line");
    std::size_t idx = 0;
    if (tok.size() < 2 || tok[0] != "layer" || !textio::parse_int(tok[1], idx) || idx != i)
      throw ParseError("expected \"layer " + std::to_string(i) + " ...\"", li);
    LayerSpec l;
    bool seen[7] = {};
    try {
      for (std::size_t k = 2; k < tok.size(); ++k) {
        auto eq = tok[k].find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key=value, got '" + std::string(tok[k]) + "'", li);
        std::string key(tok[k].substr(0, eq));
        std::string val(tok[k].substr(eq + 1));
        int slot = -1;
        if (key == "attention") {
          l.attention = parse_attention(val), slot = 0;
        } else if (key == "aggregation") {
          l.aggregation = parse_aggregation(val), slot = 1;
        } else if (key == "activation") {
          l.activation = parse_activation(val), slot = 2;
        } else if (key == "heads") {
          if (!textio::parse_int(val, l.heads)) throw ParseError("bad heads '" + val + "'", li);
          slot = 3;
        } else if (key == "hidden") {
          if (!textio::parse_int(val, l.hidden)) throw ParseError("bad hidden '" + val + "'", li);
          slot = 4;
        } else if (key == "two_hop") {
          if (val != "true" && val != "false") throw ParseError("two_hop must be true or false", li);
          l.two_hop = val == "true", slot = 5;
        } else if (key == "skip") {
          l.skip = parse_skip(val), slot = 6;
        } else {
          throw ParseError("unknown key '" + key + "'", li);
        }
        if (seen[slot]) throw ParseError("duplicate key '" + key + "'", li);
        seen[slot] = true;
      }
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), li);
    }
    if (!std::all_of(std::begin(seen), std::end(seen), [](bool b) { return b; }))
      throw ParseError("layer line must set attention, aggregation, activation, heads, hidden, two_hop and skip", li);
    arch.layers.push_back(l);
  }
  while (li < lines.size())
    if (!textio::split_ws(lines[li++]).empty()) throw ParseError("trailing content", li);
  arch.validate();
  return arch;
}

ArchSpec load_arch(const std::string& name_or_path) {
  if (name_or_path == "gcn_default" && !std::filesystem::exists(name_or_path)) return gcn_default();
  return parse_arch(textio::read_file(name_or_path));
}

std::string name(Initializer init) {
  switch (init) {
    case Initializer::kXavier: return "XAVIER";
    case Initializer::kKaiming: return "KAIMING";
    case Initializer::kUniform: return "UNIFORM";
  }
  return "?";
}

Initializer parse_initializer(const std::string& s) {
  return parse_enum(s, std::array{Initializer::kXavier, Initializer::kKaiming, Initializer::kUniform}, "initializer");
}

}  // namespace qnas::gnn
