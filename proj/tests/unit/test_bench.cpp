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

#include <doctest.h>

#include "qnas/bench/bench.hpp"
#include "qnas/error.hpp"
#include "qnas/graph.hpp"
#include "qnas/qubo.hpp"

using namespace qnas;
using namespace qnas::bench;

TEST_CASE("greedy MaxCut on K3 reaches the optimum") {
  Graph k3(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
  auto x = baseline_greedy(k3, Task::maxcut());
  CHECK(cut_value(k3, x) == 2.0);
}

TEST_CASE("greedy MaxCut is 1-flip optimal") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto g = gen_random(RandomGraphSpec::erdos_renyi(40, 0.15, s));
    auto x = baseline_greedy(g, Task::maxcut());
    CHECK(best_flip_gain(g, x) <= 1e-12);
  }
  auto t = toroidal_grid(6, 6);
  CHECK(best_flip_gain(t, baseline_greedy(t, Task::maxcut())) <= 0.0);
}

TEST_CASE("greedy MIS takes every leaf of a star") {
  const std::size_t k = 7;
  std::vector<Edge> edges;
  for (NodeId i = 1; i <= k; ++i) edges.push_back({0, i, 1.0});
  Graph star(k + 1, edges);
  auto x = baseline_greedy(star, Task::mis(2.0));
  CHECK(x[0] == 0);
  std::size_t size = 0;
  for (auto b : x) size += b;
  CHECK(size == k);
}

TEST_CASE("greedy MIS is always independent") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto g = gen_random(RandomGraphSpec::erdos_renyi(60, 0.1, s));
    CHECK(is_independent(g, baseline_greedy(g, Task::mis(2.0))));
  }
  CHECK_THROWS_AS(baseline_greedy(Graph(2, {}), Task::generic()), InvalidArgument);
}

TEST_CASE("report CSV") {
  CHECK(write_csv({}) == std::string(kCsvHeader) + "\n");
  std::vector<ResultRow> rows{{"G50", 3000, 6000, "search", 5800, 12.5, 1},
                              {"G49", 3000, 6000, "search", 5990, 10.0, 1},
                              {"G50", 3000, 6000, "greedy", 5700, 0.1, 0},
                              {"G49", 3000, 6000, "greedy", 5600, 0.1, 0}};
  auto csv = write_csv(rows);
  auto back = parse_csv(csv);
  REQUIRE(back.size() == 4);
  CHECK(back[0].instance == "G49");
  CHECK(back[0].method == "greedy");
  CHECK(back[3].instance == "G50");
  CHECK(back[3].method == "search");
  auto sorted = rows;
  sort_rows(sorted);
  CHECK(back == sorted);
  CHECK_THROWS_AS(parse_csv("wrong,header\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\nG1,1,2\n"), ParseError);
}

TEST_CASE("reference columns carry the published values") {
  CHECK(reference_value("G49", "BLS").value() == 6000);
  CHECK(reference_value("G50", "BLS").value() == 5880);
  CHECK(reference_value("G14", "PI-GNN").value() == 3026);
  CHECK_FALSE(reference_value("G70", "RUN-CSP").has_value());
  CHECK_FALSE(reference_value("er_50", "BLS").has_value());
  std::vector<ResultRow> rows{{"G49", 3000, 6000, "search", 5990, 10.0, 1},
                              {"G50", 3000, 6000, "search", 5800, 12.5, 1}};
  auto table = format_table(rows);
  CHECK(table.find("BLS [reported]") != std::string::npos);
  auto l49 = table.substr(table.find("G49"));
  l49 = l49.substr(0, l49.find('\n'));
  CHECK(l49.find("6000") != std::string::npos);
  auto l50 = table.substr(table.find("G50"));
  CHECK(l50.find("5880") != std::string::npos);
  // Tables without Gset instances have no reference columns.
  CHECK(format_table({{"er", 10, 12, "greedy", 5, 0.0, 0}}).find("[reported]") == std::string::npos);
}

TEST_CASE("manifest digests") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
  RunManifest m;
  m.command = "train";
  m.seeds = {3};
  m.artifacts = {{"out/x", hex64(fnv1a64("abc"))}};
  auto j = manifest_to_json(m);
  CHECK(j.find("\"command\": \"train\"") != std::string::npos);
  CHECK(j.find(hex64(fnv1a64("abc"))) != std::string::npos);
}
