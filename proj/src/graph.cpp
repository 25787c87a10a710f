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

#include "qnas/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_set>

#include "qnas/error.hpp"
#include "qnas/rng.hpp"
#include "qnas/textio.hpp"

namespace qnas {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ > std::numeric_limits<NodeId>::max()) throw InvalidArgument("graph too large");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  std::vector<std::size_t> deg(n_, 0);
  for (auto& e : edges_) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v) throw InvalidArgument("self-loop at node " + std::to_string(e.u));
    if (e.v >= n_) throw InvalidArgument("edge endpoint " + std::to_string(e.v) + " out of range");
    if (!seen.insert(pair_key(e.u, e.v)).second)
      throw InvalidArgument("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n_ + 1, 0);
  for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  nbrs_.resize(offsets_[n_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    nbrs_[fill[e.u]++] = {e.v, e.w};
    nbrs_[fill[e.v]++] = {e.u, e.w};
  }
  for (std::size_t i = 0; i < n_; ++i) {
    std::sort(nbrs_.begin() + offsets_[i], nbrs_.begin() + offsets_[i + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    max_degree_ = std::max(max_degree_, deg[i]);
  }
}

std::span<const Neighbor> Graph::adjacency(NodeId v) const {
  if (v >= n_) throw InvalidArgument("node " + std::to_string(v) + " out of range");
  return {nbrs_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

double Graph::total_weight() const noexcept {
  double s = 0.0;
  for (const auto& e : edges_) s += e.w;
  return s;
}

bool Graph::operator==(const Graph& other) const {
  return n_ == other.n_ && edges_ == other.edges_;
}

Graph parse_gset(std::string_view text) {
  auto lines = textio::split_lines(text);
  std::size_t li = 0;
  auto next_nonblank = [&]() -> bool {
    while (li < lines.size() && textio::split_ws(lines[li]).empty()) ++li;
    return li < lines.size();
  };
  if (!next_nonblank()) throw ParseError("empty input: missing \"n m\" header", 1);
  auto header = textio::split_ws(lines[li]);
  std::size_t n = 0, m = 0;
  if (header.size() != 2 || !textio::parse_int(header[0], n) || !textio::parse_int(header[1], m))
    throw ParseError("malformed header, expected \"n m\"", li + 1);
  ++li;
  std::vector<Edge> edges;
  edges.reserve(m);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  for (std::size_t k = 0; k < m; ++k) {
    if (!next_nonblank())
      throw ParseError("expected " + std::to_string(m) + " edges, found " + std::to_string(k), li + 1);
    auto tok = textio::split_ws(lines[li]);
    std::size_t i = 0, j = 0;
    double w = 0.0;
    if (tok.size() != 3 || !textio::parse_int(tok[0], i) || !textio::parse_int(tok[1], j) ||
        !textio::parse_double(tok[2], w))
      throw ParseError("malformed edge line, expected \"i j w\"", li + 1);
    if (i < 1 || i > n || j < 1 || j > n) throw ParseError("node index out of range", li + 1);
    if (i == j) throw ParseError("self-loop", li + 1);
    auto u = static_cast<NodeId>(std::min(i, j) - 1);
    auto v = static_cast<NodeId>(std::max(i, j) - 1);
    if (!seen.insert(pair_key(u, v)).second) throw ParseError("duplicate edge", li + 1);
    edges.push_back({static_cast<NodeId>(i - 1), static_cast<NodeId>(j - 1), w});
    ++li;
  }
  if (next_nonblank()) throw ParseError("trailing content after " + std::to_string(m) + " edges", li + 1);
  return Graph(n, std::move(edges));
}

std::string write_gset(const Graph& g) {
  std::string out = std::to_string(g.num_nodes()) + " " + std::to_string(g.num_edges()) + "\n";
  for (const auto& e : g.edges()) {
    out += std::to_string(e.u + 1);
    out += ' ';
    out += std::to_string(e.v + 1);
    out += ' ';
    out += textio::format_double(e.w);
    out += '\n';
  }
  return out;
}

Graph load_gset(const std::string& path) { return parse_gset(textio::read_file(path)); }

RandomGraphSpec RandomGraphSpec::erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  RandomGraphSpec s;
  s.family = Family::kErdosRenyi;
  s.n = n;
  s.p = p;
  s.seed = seed;
  return s;
}

RandomGraphSpec RandomGraphSpec::d_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  RandomGraphSpec s;
  s.family = Family::kDRegular;
  s.n = n;
  s.d = d;
  s.seed = seed;
  return s;
}

namespace {

Graph gen_erdos_renyi(const RandomGraphSpec& spec) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw InvalidArgument("erdos-renyi p must lie in [0,1]");
  auto rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < spec.n; ++u)
    for (std::size_t v = u + 1; v < spec.n; ++v)
      if (unif(rng) < spec.p) edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0});
  return Graph(spec.n, std::move(edges));
}

Graph gen_d_regular(const RandomGraphSpec& spec) {
  const std::size_t n = spec.n, d = spec.d;
  if ((n * d) % 2 != 0) throw InvalidArgument("d-regular requires n*d even");
  if (d > 0 && d >= n) throw InvalidArgument("d-regular requires d < n");
  auto rng = make_rng(spec.seed);
  std::vector<NodeId> points(n * d);
  for (std::size_t i = 0; i < n * d; ++i) points[i] = static_cast<NodeId>(i / (d ? d : 1));
  constexpr int kMaxAttempts = 10000;
  std::unordered_set<std::uint64_t> seen;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::shuffle(points.begin(), points.end(), rng);
    seen.clear();
    std::vector<Edge> edges;
    edges.reserve(n * d / 2);
    bool simple = true;
    for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
      NodeId u = points[i], v = points[i + 1];
      if (u == v) { simple = false; break; }
      if (u > v) std::swap(u, v);
      if (!seen.insert(pair_key(u, v)).second) { simple = false; break; }
      edges.push_back({u, v, 1.0});
    }
    if (simple) return Graph(n, std::move(edges));
  }
  throw InvalidArgument("d-regular pairing model failed to produce a simple graph after 10000 attempts");
}

std::map<std::string, std::string, std::less<>> parse_kv(std::string_view body) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto comma = body.find(',', pos);
    auto item = body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("graph spec item without '=': " + std::string(item));
    kv.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return kv;
}

template <class T>
T kv_get(const std::map<std::string, std::string, std::less<>>& kv, const char* key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ParseError(std::string("graph spec missing key '") + key + "'");
  T out{};
  bool ok;
  if constexpr (std::is_floating_point_v<T>) ok = textio::parse_double(it->second, out);
  else ok = textio::parse_int(it->second, out);
  if (!ok) throw ParseError(std::string("graph spec bad value for '") + key + "'");
  return out;
}

}  // namespace

Graph gen_random(const RandomGraphSpec& spec) {
  switch (spec.family) {
    case RandomGraphSpec::Family::kErdosRenyi: return gen_erdos_renyi(spec);
    case RandomGraphSpec::Family::kDRegular: return gen_d_regular(spec);
  }
  throw InvalidArgument("unknown random graph family");
}

Graph gen_from_string(std::string_view spec, std::uint64_t seed) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw ParseError("graph spec must look like family:key=value,...");
  auto family = spec.substr(0, colon);
  auto kv = parse_kv(spec.substr(colon + 1));
  if (family == "er" || family == "erdos-renyi")
    return gen_random(RandomGraphSpec::erdos_renyi(kv_get<std::size_t>(kv, "n"), kv_get<double>(kv, "p"), seed));
  if (family == "regular" || family == "d-regular")
    return gen_random(RandomGraphSpec::d_regular(kv_get<std::size_t>(kv, "n"), kv_get<std::size_t>(kv, "d"), seed));
  if (family == "torus") return toroidal_grid(kv_get<std::size_t>(kv, "rows"), kv_get<std::size_t>(kv, "cols"));
  throw ParseError("unknown graph family '" + std::string(family) + "'");
}

Graph toroidal_grid(std::size_t rows, std::size_t cols) {
  if (rows < 3 || cols < 3) throw InvalidArgument("torus needs rows, cols >= 3");
  std::vector<Edge> edges;
  edges.reserve(rows * cols * 2);
  auto id = [cols](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * cols + c); };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      edges.push_back({id(r, c), id(r, (c + 1) % cols), 1.0});
      edges.push_back({id(r, c), id((r + 1) % rows, c), 1.0});
    }
  return Graph(rows * cols, std::move(edges));
}

std::vector<NodeId> neighbors(const Graph& g, NodeId v) {
  std::vector<NodeId> out;
  for (const auto& nb : g.adjacency(v)) out.push_back(nb.node);
  return out;
}

std::vector<NodeId> two_hop_neighbors(const Graph& g, NodeId v) {
  std::vector<NodeId> out;
  for (const auto& via : g.adjacency(v))
    for (const auto& nb : g.adjacency(via.node))
      if (nb.node != v) out.push_back(nb.node);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace qnas
