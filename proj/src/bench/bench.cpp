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

#include "qnas/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "qnas/error.hpp"
#include "qnas/textio.hpp"

namespace qnas::bench {

namespace {

// Sum of edge weights from v to nodes on side s.
double weight_to_side(const Graph& g, const BinaryAssignment& x, NodeId v, std::uint8_t s) {
  double w = 0.0;
  for (const auto& nb : g.adjacency(v))
    if (x[nb.node] == s) w += nb.w;
  return w;
}

double flip_gain(const Graph& g, const BinaryAssignment& x, NodeId v) {
  return weight_to_side(g, x, v, x[v]) - weight_to_side(g, x, v, 1 - x[v]);
}

BinaryAssignment greedy_maxcut(const Graph& g) {
  const auto n = g.num_nodes();
  BinaryAssignment x(n, 0);
  std::vector<std::uint8_t> placed(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    double to0 = 0.0, to1 = 0.0;
    for (const auto& nb : g.adjacency(v))
      if (placed[nb.node]) (x[nb.node] ? to1 : to0) += nb.w;
    x[v] = to0 > to1 ? 1 : 0;
    placed[v] = 1;
  }
  bool improved = true;
  while (improved) {
    improved = false;
    for (NodeId v = 0; v < n; ++v)
      if (flip_gain(g, x, v) > 1e-12) {
        x[v] = 1 - x[v];
        improved = true;
      }
  }
  return x;
}

BinaryAssignment greedy_mis(const Graph& g) {
  const auto n = g.num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return g.degree(a) < g.degree(b); });
  BinaryAssignment x(n, 0);
  for (NodeId v : order) {
    bool free = true;
    for (const auto& nb : g.adjacency(v)) free = free && !x[nb.node];
    if (free) x[v] = 1;
  }
  return x;
}

std::string pad(const std::string& s, std::size_t w, bool right) {
  if (s.size() >= w) return s;
  return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string format_objective(double v) {
  return v == std::floor(v) && std::abs(v) < 1e15 ? fixed(v, 0) : textio::format_double(v);
}

}  // namespace

BinaryAssignment baseline_greedy(const Graph& g, const Task& task) {
  switch (task.kind) {
    case TaskKind::kMaxCut:
      return greedy_maxcut(g);
    case TaskKind::kMis:
      return greedy_mis(g);
    case TaskKind::kGeneric:
      break;
  }
  throw InvalidArgument("greedy baseline needs a maxcut or mis task");
}

double best_flip_gain(const Graph& g, const BinaryAssignment& x) {
  double best = -std::numeric_limits<double>::infinity();
  for (NodeId v = 0; v < g.num_nodes(); ++v) best = std::max(best, flip_gain(g, x, v));
  return best;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.instance, a.method, a.seed) < std::tie(b.instance, b.method, b.seed);
  });
}

std::string write_csv(std::vector<ResultRow> rows) {
  sort_rows(rows);
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) {
    if (r.instance.find_first_of(",\n") != std::string::npos || r.method.find_first_of(",\n") != std::string::npos)
      throw InvalidArgument("instance and method names may not contain commas or newlines");
    out += r.instance + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + r.method + "," +
           textio::format_double(r.objective) + "," + textio::format_double(r.seconds) + "," +
           std::to_string(r.seed) + "\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  auto lines = textio::split_lines(text);
  if (lines.empty() || lines[0] != kCsvHeader) throw ParseError(std::string("expected header ") + kCsvHeader, 1);
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = lines[i];
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= line.size(); ++k)
      if (k == line.size() || line[k] == ',') {
        f.push_back(line.substr(start, k - start));
        start = k + 1;
      }
    ResultRow r;
    if (f.size() != 7 || !textio::parse_int(f[1], r.n) || !textio::parse_int(f[2], r.m) ||
        !textio::parse_double(f[4], r.objective) || !textio::parse_double(f[5], r.seconds) ||
        !textio::parse_int(f[6], r.seed))
      throw ParseError("malformed result row", i + 1);
    r.instance = std::string(f[0]);
    r.method = std::string(f[3]);
    rows.push_back(std::move(r));
  }
  return rows;
}

const std::vector<std::string>& reference_methods() {
  static const std::vector<std::string> m{"BLS", "DSDP", "KHLWG", "RUN-CSP", "PI-GNN", "GNN-NAS"};
  return m;
}

const std::vector<ReferenceRow>& reference_table() {
  static const std::vector<ReferenceRow> t{
      {"G14", 800, 4694, {{"BLS", 3064}, {"DSDP", 2922}, {"KHLWG", 3061}, {"RUN-CSP", 2943}, {"PI-GNN", 3026}, {"GNN-NAS", 3062}}},
      {"G15", 800, 4661, {{"BLS", 3050}, {"DSDP", 2938}, {"KHLWG", 3050}, {"RUN-CSP", 2928}, {"PI-GNN", 2990}, {"GNN-NAS", 3040}}},
      {"G22", 2000, 19990, {{"BLS", 13359}, {"DSDP", 12960}, {"KHLWG", 13359}, {"RUN-CSP", 13028}, {"PI-GNN", 13181}, {"GNN-NAS", 13333}}},
      {"G49", 3000, 6000, {{"BLS", 6000}, {"DSDP", 6000}, {"KHLWG", 6000}, {"RUN-CSP", 6000}, {"PI-GNN", 5918}, {"GNN-NAS", 6000}}},
      {"G50", 3000, 6000, {{"BLS", 5880}, {"DSDP", 5880}, {"KHLWG", 5880}, {"RUN-CSP", 5880}, {"PI-GNN", 5820}, {"GNN-NAS", 5880}}},
      {"G55", 5000, 12468, {{"BLS", 10294}, {"DSDP", 9960}, {"KHLWG", 10236}, {"RUN-CSP", 10116}, {"PI-GNN", 10138}, {"GNN-NAS", 10162}}},
      {"G70", 10000, 9999, {{"BLS", 9541}, {"DSDP", 9456}, {"KHLWG", 9458}, {"PI-GNN", 9421}, {"GNN-NAS", 9499}}},
  };
  return t;
}

std::optional<double> reference_value(const std::string& instance, const std::string& method) {
  for (const auto& r : reference_table()) {
    if (r.instance != instance) continue;
    auto it = r.values.find(method);
    if (it != r.values.end()) return it->second;
  }
  return std::nullopt;
}

std::string format_table(std::vector<ResultRow> rows) {
  sort_rows(rows);
  bool any_ref = false;
  for (const auto& r : rows)
    for (const auto& t : reference_table()) any_ref = any_ref || t.instance == r.instance;

  std::vector<std::string> header{"instance", "n", "m", "method", "objective", "seconds", "seed"};
  if (any_ref)
    for (const auto& m : reference_methods()) header.push_back(m + " [reported]");
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& r : rows) {
    std::vector<std::string> c{r.instance, std::to_string(r.n), std::to_string(r.m), r.method,
                               format_objective(r.objective), fixed(r.seconds, 2), std::to_string(r.seed)};
    if (any_ref)
      for (const auto& m : reference_methods()) {
        auto v = reference_value(r.instance, m);
        c.push_back(v ? format_objective(*v) : "-");
      }
    cells.push_back(std::move(c));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells)
    for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string line;
    for (std::size_t k = 0; k < cells[i].size(); ++k) {
      const bool right = k != 0 && k != 3;
      if (k) line += "  ";
      line += pad(cells[i][k], width[k], right && i > 0);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config_path;
  j["instances"] = m.instances;
  j["seeds"] = m.seeds;
  j["out_dir"] = m.out_dir;
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc;
  auto arts = nlohmann::ordered_json::array();
  for (const auto& a : m.artifacts) arts.push_back({{"path", a.path}, {"fnv1a64", a.fnv1a64}});
  j["artifacts"] = arts;
  return j.dump(2) + "\n";
}

}  // namespace qnas::bench
