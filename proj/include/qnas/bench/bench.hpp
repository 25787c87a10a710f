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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qnas/graph.hpp"
#include "qnas/qubo.hpp"

namespace qnas::bench {

// MaxCut: one greedy placement pass in node order, then single flips until no
// flip improves the cut. MIS: nodes by ascending (degree, id), taken when no
// neighbor is taken yet.
BinaryAssignment baseline_greedy(const Graph& g, const Task& task);

// Largest cut gain of flipping one node of x (<= 0 at a 1-flip optimum).
double best_flip_gain(const Graph& g, const BinaryAssignment& x);

struct ResultRow {
  std::string instance;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string method;
  double objective = 0.0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kCsvHeader = "instance,n,m,method,objective,seconds,seed";

// Stable order: instance name, then method, then seed.
void sort_rows(std::vector<ResultRow>& rows);

std::string write_csv(std::vector<ResultRow> rows);
// Accepts exactly the header above; throws ParseError with the line number.
std::vector<ResultRow> parse_csv(const std::string& text);

// Published MaxCut values for Gset instances, one entry per method column.
struct ReferenceRow {
  std::string instance;
  std::size_t nodes;
  std::size_t edges;
  // Method name -> value; absent when the source table has no entry.
  std::map<std::string, double> values;
};

const std::vector<std::string>& reference_methods();
const std::vector<ReferenceRow>& reference_table();
std::optional<double> reference_value(const std::string& instance, const std::string& method);

// Aligned text table of `rows` (sorted as above). Instances that appear in
// the reference table get one extra column per reference method, headed
// "<method> [reported]".
std::string format_table(std::vector<ResultRow> rows);

struct Artifact {
  std::string path;
  std::string fnv1a64;  // hex digest of the file contents
};

// Provenance of one CLI invocation.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config_path;
  std::vector<std::string> instances;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::string started_utc;
  std::string finished_utc;
  std::vector<Artifact> artifacts;
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);
std::string utc_now();
std::string manifest_to_json(const RunManifest& m);

}  // namespace qnas::bench
