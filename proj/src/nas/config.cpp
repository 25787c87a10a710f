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

#include <json.hpp>

#include "qnas/error.hpp"
#include "qnas/nas/search.hpp"

namespace qnas::nas {

using nlohmann::json;

namespace {

std::string optimizer_name(ad::OptimizerKind k) { return k == ad::OptimizerKind::kAdam ? "ADAM" : "ADAMW"; }

ad::OptimizerKind parse_optimizer(const std::string& s) {
  if (s == "ADAM" || s == "adam") return ad::OptimizerKind::kAdam;
  if (s == "ADAMW" || s == "adamw") return ad::OptimizerKind::kAdamW;
  throw InvalidArgument("unknown optimizer '" + s + "'");
}

template <class T>
json names(const std::vector<T>& ops) {
  json a = json::array();
  for (auto op : ops) a.push_back(gnn::name(op));
  return a;
}

template <class T, class F>
std::vector<T> parse_names(const json& j, F parse) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("candidate list must be a non-empty array");
  std::vector<T> out;
  for (const auto& e : j) out.push_back(parse(e.get<std::string>()));
  return out;
}

json to_json(const SearchConfig& c) {
  return json{{"initializer", gnn::name(c.init)},
              {"learning_rate", c.learning_rate},
              {"batch_norm", c.batch_norm},
              {"optimizer", optimizer_name(c.optimizer)},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"patience", c.patience},
              {"two_hop", c.two_hop},
              {"heads", c.heads},
              {"layers", c.layers},
              {"hidden", c.hidden},
              {"weight_decay", c.weight_decay},
              {"arch_learning_rate", c.arch_learning_rate},
              {"xi", c.xi},
              {"noise", c.noise},
              {"delta", c.delta},
              {"sigma0", c.sigma0},
              {"gamma", c.gamma},
              {"stop_threshold", c.stop_threshold},
              {"early_stop_search", c.early_stop_search},
              {"decode_threshold", c.decode_threshold},
              {"seed", c.seed},
              {"attention_candidates", names(c.candidates.attention)},
              {"aggregation_candidates", names(c.candidates.aggregation)},
              {"activation_candidates", names(c.candidates.activation)},
              {"skip_candidates", names(c.candidates.skip)},
              {"combine_candidates", names(c.combine_candidates)}};
}

SearchConfig from_json(const json& j) {
  if (!j.is_object()) throw ParseError("search config must be a JSON object");
  SearchConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "initializer") c.init = gnn::parse_initializer(v.get<std::string>());
      else if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "batch_norm") c.batch_norm = v.get<bool>();
      else if (key == "optimizer") c.optimizer = parse_optimizer(v.get<std::string>());
      else if (key == "epochs") c.epochs = v.get<std::size_t>();
      else if (key == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (key == "patience") c.patience = v.get<std::size_t>();
      else if (key == "two_hop") c.two_hop = v.get<bool>();
      else if (key == "heads") c.heads = v.get<std::size_t>();
      else if (key == "layers") c.layers = v.get<std::size_t>();
      else if (key == "hidden") c.hidden = v.get<std::size_t>();
      else if (key == "weight_decay") c.weight_decay = v.get<double>();
      else if (key == "arch_learning_rate") c.arch_learning_rate = v.get<double>();
      else if (key == "xi") c.xi = v.get<double>();
      else if (key == "noise") c.noise = v.get<bool>();
      else if (key == "delta") c.delta = v.get<double>();
      else if (key == "sigma0") c.sigma0 = v.get<double>();
      else if (key == "gamma") c.gamma = v.get<double>();
      else if (key == "stop_threshold") c.stop_threshold = v.get<double>();
      else if (key == "early_stop_search") c.early_stop_search = v.get<bool>();
      else if (key == "decode_threshold") c.decode_threshold = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "attention_candidates")
        c.candidates.attention = parse_names<gnn::AttentionOp>(v, gnn::parse_attention);
      else if (key == "aggregation_candidates")
        c.candidates.aggregation = parse_names<gnn::Aggregation>(v, gnn::parse_aggregation);
      else if (key == "activation_candidates")
        c.candidates.activation = parse_names<gnn::Activation>(v, gnn::parse_activation);
      else if (key == "skip_candidates") c.candidates.skip = parse_names<gnn::SkipOp>(v, gnn::parse_skip);
      else if (key == "combine_candidates") c.combine_candidates = parse_names<gnn::CombineOp>(v, gnn::parse_combine);
      else throw ParseError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace

SearchConfig parse_search_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  return from_json(j);
}

std::string write_search_config(const SearchConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string trial_to_json(const TrialResult& t) {
  std::string x;
  for (auto b : t.assignment) x += b ? '1' : '0';
  json j{{"arch", gnn::write_arch(t.arch)},
         {"config", to_json(t.config)},
         {"metric", t.metric},
         {"hamiltonian", t.hamiltonian},
         {"objective", t.objective},
         {"valid", t.valid},
         {"seconds", t.seconds},
         {"seed", t.seed},
         {"epochs_run", t.epochs_run},
         {"assignment", x}};
  return j.dump(2) + "\n";
}

TrialResult trial_from_json(const std::string& text) {
  TrialResult t;
  try {
    auto j = json::parse(text);
    t.arch = gnn::parse_arch(j.at("arch").get<std::string>());
    t.config = from_json(j.at("config"));
    t.metric = j.at("metric").get<double>();
    t.hamiltonian = j.at("hamiltonian").get<double>();
    t.objective = j.at("objective").get<double>();
    t.valid = j.at("valid").get<bool>();
    t.seconds = j.at("seconds").get<double>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.epochs_run = j.at("epochs_run").get<std::size_t>();
    for (char ch : j.at("assignment").get<std::string>()) {
      if (ch != '0' && ch != '1') throw ParseError("assignment must be a 0/1 string");
      t.assignment.push_back(ch == '1');
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad trial record: ") + e.what());
  }
  return t;
}

}  // namespace qnas::nas
