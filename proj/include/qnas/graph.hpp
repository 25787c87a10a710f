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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qnas {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u;
  NodeId v;
  double w;
  bool operator==(const Edge&) const = default;
};

struct Neighbor {
  NodeId node;
  double w;
};

// Undirected weighted simple graph. Immutable after construction; edges are
// normalized to u < v and kept in input order, adjacency lists are sorted by
// node id.
class Graph {
 public:
  Graph() = default;
  // Throws InvalidArgument on self-loops, duplicates or out-of-range ids.
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Neighbor> adjacency(NodeId v) const;
  std::size_t degree(NodeId v) const { return adjacency(v).size(); }
  std::size_t max_degree() const noexcept { return max_degree_; }
  double total_weight() const noexcept;

  bool operator==(const Graph& other) const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> nbrs_;
  std::size_t max_degree_ = 0;
};

// Gset text: "n m" header then m lines "i j w" with 1-based node ids.
Graph parse_gset(std::string_view text);
std::string write_gset(const Graph& g);
Graph load_gset(const std::string& path);

struct RandomGraphSpec {
  enum class Family { kErdosRenyi, kDRegular };
  Family family = Family::kErdosRenyi;
  std::size_t n = 0;
  double p = 0.0;     // erdos-renyi edge probability
  std::size_t d = 0;  // d-regular degree
  std::uint64_t seed = 0;

  static RandomGraphSpec erdos_renyi(std::size_t n, double p, std::uint64_t seed);
  static RandomGraphSpec d_regular(std::size_t n, std::size_t d, std::uint64_t seed);
};

// Deterministic per spec. d-regular uses the pairing model, rejecting
// non-simple pairings, and gives up after 10^4 attempts.
Graph gen_random(const RandomGraphSpec& spec);

// Parses "er:n=50,p=0.1" / "regular:n=100,d=3" / "torus:rows=30,cols=100".
// Torus specs are deterministic and ignore the seed.
Graph gen_from_string(std::string_view spec, std::uint64_t seed);

// rows x cols 2-D torus with unit weights (rows, cols >= 3). Node id is
// r * cols + c.
Graph toroidal_grid(std::size_t rows, std::size_t cols);

std::vector<NodeId> neighbors(const Graph& g, NodeId v);

// {v' != v : N(v) and N(v') intersect}, ascending. v itself is excluded.
std::vector<NodeId> two_hop_neighbors(const Graph& g, NodeId v);

}  // namespace qnas
