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

#include "qnas/qubo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "qnas/error.hpp"
#include "qnas/textio.hpp"

namespace qnas {

std::string task_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kMaxCut: return "maxcut";
    case TaskKind::kMis: return "mis";
    case TaskKind::kGeneric: return "generic";
  }
  return "?";
}

TaskKind parse_task(const std::string& name) {
  if (name == "maxcut" || name == "MaxCut") return TaskKind::kMaxCut;
  if (name == "mis" || name == "MIS") return TaskKind::kMis;
  if (name == "generic") return TaskKind::kGeneric;
  throw InvalidArgument("unknown task '" + name + "' (expected maxcut, mis or generic)");
}

QuboInstance QuboInstance::from_pairs(
    std::size_t n, std::vector<double> diag,
    const std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, double>>& upper, Task task) {
  QuboInstance q;
  q.diag_ = std::move(diag);
  q.task_ = task;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
  for (const auto& [ij, v] : upper) {
    if (v == 0.0) continue;
    rows[ij.first].push_back({ij.second, v});
    rows[ij.second].push_back({ij.first, v});
  }
  q.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    q.offsets_[i + 1] = q.offsets_[i] + rows[i].size();
    for (const auto& [c, v] : rows[i]) {
      q.cols_.push_back(c);
      q.vals_.push_back(v);
    }
  }
  return q;
}

QuboInstance QuboInstance::from_dense(const std::vector<std::vector<double>>& dense, Task task) {
  const std::size_t n = dense.size();
  std::vector<double> diag(n);
  std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, double>> upper;
  for (std::size_t i = 0; i < n; ++i) {
    if (dense[i].size() != n) throw InvalidArgument("Q row " + std::to_string(i) + " has wrong length");
    diag[i] = dense[i][i];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dense[i][j] != dense[j][i])
        throw InvalidArgument("Q is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (dense[i][j] != 0.0)
        upper.push_back({{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)}, dense[i][j]});
    }
  return from_pairs(n, std::move(diag), upper, task);
}

double QuboInstance::at(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw InvalidArgument("Q index out of range");
  if (i == j) return diag_[i];
  auto b = cols_.begin() + offsets_[i], e = cols_.begin() + offsets_[i + 1];
  auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(j));
  return (it != e && *it == j) ? vals_[it - cols_.begin()] : 0.0;
}

std::vector<std::vector<double>> QuboInstance::dense() const {
  std::vector<std::vector<double>> d(size(), std::vector<double>(size(), 0.0));
  for (std::size_t i = 0; i < size(); ++i) {
    d[i][i] = diag_[i];
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) d[i][cols_[k]] = vals_[k];
  }
  return d;
}

std::vector<double> QuboInstance::multiply(const std::vector<double>& x) const {
  if (x.size() != size()) throw ShapeError("Q multiply: vector length " + std::to_string(x.size()) + " vs n=" +
                                           std::to_string(size()));
  std::vector<double> y(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double s = diag_[i] * x[i];
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
    y[i] = s;
  }
  return y;
}

std::shared_ptr<const Graph> QuboInstance::interaction_graph() const {
  if (graph_) return graph_;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
      if (cols_[k] > i) edges.push_back({static_cast<NodeId>(i), cols_[k], vals_[k]});
  return std::make_shared<const Graph>(size(), std::move(edges));
}

QuboInstance qubo_from_maxcut(const Graph& g) {
  std::vector<double> diag(g.num_nodes(), 0.0);
  std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, double>> upper;
  for (const auto& e : g.edges()) {
    diag[e.u] -= e.w;
    diag[e.v] -= e.w;
    upper.push_back({{e.u, e.v}, e.w});
  }
  auto q = QuboInstance::from_pairs(g.num_nodes(), std::move(diag), upper, Task::maxcut());
  q.graph_ = std::make_shared<const Graph>(g);
  return q;
}

QuboInstance qubo_from_mis(const Graph& g, double penalty) {
  if (!(penalty > 1.0))
    throw InvalidArgument("MIS penalty must exceed 1 (got " + textio::format_double(penalty) +
                          "); otherwise the optimum may not be independent");
  std::vector<double> diag(g.num_nodes(), -1.0);
  std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, double>> upper;
  for (const auto& e : g.edges()) upper.push_back({{e.u, e.v}, penalty / 2.0});
  auto q = QuboInstance::from_pairs(g.num_nodes(), std::move(diag), upper, Task::mis(penalty));
  q.graph_ = std::make_shared<const Graph>(g);
  return q;
}

QuboInstance qubo_for_task(const Graph& g, const Task& task) {
  switch (task.kind) {
    case TaskKind::kMaxCut: return qubo_from_maxcut(g);
    case TaskKind::kMis: return qubo_from_mis(g, task.penalty);
    case TaskKind::kGeneric: break;
  }
  throw InvalidArgument("a generic QUBO cannot be built from a graph");
}

double hamiltonian(const QuboInstance& q, const std::vector<double>& p) {
  if (p.size() != q.size())
    throw ShapeError("hamiltonian: assignment length " + std::to_string(p.size()) + " vs n=" + std::to_string(q.size()));
  double h = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double row = q.diag(i) * p[i];
    for (std::size_t k = q.row_begin(i); k < q.row_end(i); ++k) row += q.val(k) * p[q.col(k)];
    h += p[i] * row;
  }
  return h;
}

double hamiltonian(const QuboInstance& q, const BinaryAssignment& x) {
  if (x.size() != q.size())
    throw ShapeError("hamiltonian: assignment length " + std::to_string(x.size()) + " vs n=" + std::to_string(q.size()));
  double h = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!x[i]) continue;
    double row = q.diag(i);
    for (std::size_t k = q.row_begin(i); k < q.row_end(i); ++k)
      if (x[q.col(k)]) row += q.val(k);
    h += row;
  }
  return h;
}

ad::Var relaxed_hamiltonian(const QuboInstance& q, const ad::Var& p) {
  if (p.rows() != q.size() || p.cols() != 1)
    throw ShapeError("relaxed_hamiltonian: p is " + p.value().shape_str() + ", expected " + std::to_string(q.size()) +
                     "x1");
  std::vector<double> pv(p.value().values().begin(), p.value().values().end());
  auto qp = q.multiply(pv);
  double h = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) h += pv[i] * qp[i];
  return ad::record(ad::Tensor::scalar(h), {p}, [qp = std::move(qp)](const ad::Tensor& g, std::span<ad::Tensor* const> pg) {
    ad::Tensor& gp = *pg[0];
    for (std::size_t i = 0; i < qp.size(); ++i) gp[i] += 2.0 * qp[i] * g[0];
  });
}

BinaryAssignment round_assignment(const SoftAssignment& p, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidArgument("rounding threshold must lie in (0,1)");
  BinaryAssignment x(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) x[i] = p[i] >= threshold ? 1 : 0;
  return x;
}

BinaryAssignment round_assignment(const SoftAssignment& p, const Task& task, const Graph& g, double threshold) {
  if (p.size() != g.num_nodes()) throw ShapeError("round_assignment: length mismatch with graph");
  auto x = round_assignment(p, threshold);
  if (task.kind == TaskKind::kMis) {
    for (const auto& e : g.edges()) {
      if (!(x[e.u] && x[e.v])) continue;
      // Drop the lower-probability endpoint; on ties drop the larger id.
      const NodeId drop = p[e.u] < p[e.v] ? e.u : (p[e.v] < p[e.u] ? e.v : std::max(e.u, e.v));
      x[drop] = 0;
    }
  }
  return x;
}

bool is_independent(const Graph& g, const BinaryAssignment& x) {
  for (const auto& e : g.edges())
    if (x[e.u] && x[e.v]) return false;
  return true;
}

double cut_value(const Graph& g, const BinaryAssignment& x) {
  if (x.size() != g.num_nodes()) throw ShapeError("cut_value: assignment length mismatch");
  double c = 0.0;
  for (const auto& e : g.edges())
    if (x[e.u] != x[e.v]) c += e.w;
  return c;
}

TaskScore task_metric(const Graph& g, const Task& task, const BinaryAssignment& x) {
  if (x.size() != g.num_nodes()) throw ShapeError("task_metric: assignment length mismatch");
  for (auto b : x)
    if (b > 1) throw InvalidArgument("assignment entries must be 0 or 1");
  switch (task.kind) {
    case TaskKind::kMaxCut: return {cut_value(g, x), true};
    case TaskKind::kMis: {
      if (!is_independent(g, x)) return {0.0, false};
      double s = 0.0;
      for (auto b : x) s += b;
      return {s, true};
    }
    case TaskKind::kGeneric: break;
  }
  throw InvalidArgument("generic QUBO tasks have no graph metric; use the Hamiltonian");
}

namespace {

struct ChunkBest {
  std::uint64_t code = 0;
  double value = 0.0;
  bool set = false;
};

// Bit (n-1-i) of `code` holds x_i, so integer order is lexicographic order.
BinaryAssignment decode_bits(std::uint64_t code, std::size_t n) {
  BinaryAssignment x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1ULL);
  return x;
}

void consider(ChunkBest& best, std::uint64_t code, double value, const QuboInstance& q, std::size_t n) {
  if (!best.set) {
    best = {code, value, true};
    return;
  }
  const double tol = 1e-9 * (1.0 + std::abs(best.value));
  if (value < best.value - tol) {
    best = {code, value, true};
  } else if (value <= best.value + tol) {
    const double a = hamiltonian(q, decode_bits(code, n));
    const double b = hamiltonian(q, decode_bits(best.code, n));
    if (a < b || (a == b && code < best.code)) best = {code, a, true};
    else best.value = b;
  }
}

ChunkBest enumerate_chunk(const QuboInstance& q, const std::vector<std::vector<double>>& Q, std::size_t n,
                          std::size_t low_bits, std::uint64_t prefix) {
  // The low `low_bits` code bits vary in Gray order; code bit b is x_{n-1-b}.
  std::uint64_t code = prefix << low_bits;
  auto x = decode_bits(code, n);
  std::vector<double> field(n, 0.0);  // sum_{j != i} Q_ij x_j
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && x[j]) field[i] += Q[i][j];
  double h = hamiltonian(q, x);
  ChunkBest best;
  consider(best, code, h, q, n);
  const std::uint64_t total = 1ULL << low_bits;
  for (std::uint64_t t = 1; t < total; ++t) {
    const std::size_t bit = static_cast<std::size_t>(std::countr_zero(t));
    const std::size_t i = n - 1 - bit;
    const double delta = Q[i][i] + 2.0 * field[i];
    if (x[i]) {
      h -= delta;
      x[i] = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) field[j] -= Q[j][i];
    } else {
      h += delta;
      x[i] = 1;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) field[j] += Q[j][i];
    }
    code ^= 1ULL << bit;
    consider(best, code, h, q, n);
  }
  return best;
}

}  // namespace

OracleResult brute_force_optimum(const QuboInstance& q, unsigned jobs) {
  const std::size_t n = q.size();
  if (n > kBruteForceMaxVars)
    throw InvalidArgument("brute force refuses n=" + std::to_string(n) + " (limit " +
                          std::to_string(kBruteForceMaxVars) + ")");
  if (n == 0) return {{}, 0.0};
  const auto Q = q.dense();
  std::size_t top_bits = 0;
  jobs = std::max(1u, jobs);
  while ((1u << top_bits) < jobs && top_bits + 1 < n && top_bits < 6) ++top_bits;
  const std::size_t chunks = std::size_t{1} << top_bits;
  std::vector<ChunkBest> results(chunks);
  auto work = [&](std::size_t first) {
    for (std::size_t c = first; c < chunks; c += jobs) results[c] = enumerate_chunk(q, Q, n, n - top_bits, c);
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  ChunkBest best;
  for (const auto& r : results) {
    const double exact = hamiltonian(q, decode_bits(r.code, n));
    if (!best.set || exact < best.value || (exact == best.value && r.code < best.code)) best = {r.code, exact, true};
  }
  return {decode_bits(best.code, n), best.value};
}

std::string write_qubo(const QuboInstance& q) {
  std::string out = "qubo " + task_name(q.task().kind);
  if (q.task().kind == TaskKind::kMis) out += " " + textio::format_double(q.task().penalty);
  out += "\n" + std::to_string(q.size()) + "\n";
  const auto d = q.dense();
  for (const auto& row : d) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ' ';
      out += textio::format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

QuboInstance parse_qubo(const std::string& text) {
  auto lines = textio::split_lines(text);
  if (lines.size() < 2) throw ParseError("qubo file needs a header and a size line", 1);
  auto head = textio::split_ws(lines[0]);
  if (head.size() < 2 || head[0] != "qubo") throw ParseError("expected \"qubo <task> [penalty]\"", 1);
  Task task;
  task.kind = parse_task(std::string(head[1]));
  if (task.kind == TaskKind::kMis) {
    if (head.size() != 3 || !textio::parse_double(head[2], task.penalty)) throw ParseError("MIS needs a penalty", 1);
  }
  std::size_t n = 0;
  auto nl = textio::split_ws(lines[1]);
  if (nl.size() != 1 || !textio::parse_int(nl[0], n)) throw ParseError("bad size line", 2);
  if (lines.size() < 2 + n) throw ParseError("expected " + std::to_string(n) + " matrix rows", lines.size());
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto tok = textio::split_ws(lines[2 + i]);
    if (tok.size() != n) throw ParseError("row has " + std::to_string(tok.size()) + " entries", 3 + i);
    for (std::size_t j = 0; j < n; ++j)
      if (!textio::parse_double(tok[j], d[i][j])) throw ParseError("bad number", 3 + i);
  }
  return QuboInstance::from_dense(d, task);
}

std::string write_assignment(const BinaryAssignment& x) {
  std::string out = std::to_string(x.size()) + "\n";
  for (auto b : x) out += b ? '1' : '0';
  out += '\n';
  return out;
}

BinaryAssignment parse_assignment(const std::string& text) {
  auto lines = textio::split_lines(text);
  if (lines.empty()) throw ParseError("empty assignment file", 1);
  std::size_t n = 0;
  auto head = textio::split_ws(lines[0]);
  if (head.size() != 1 || !textio::parse_int(head[0], n)) throw ParseError("bad assignment header", 1);
  std::string bits;
  for (std::size_t i = 1; i < lines.size(); ++i)
    for (char c : lines[i])
      if (c == '0' || c == '1') bits += c;
      else if (c != ' ' && c != '\r' && c != '\t') throw ParseError("assignment entries must be 0 or 1", i + 1);
  if (bits.size() != n) throw ParseError("assignment has " + std::to_string(bits.size()) + " bits, header says " +
                                         std::to_string(n));
  BinaryAssignment x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = bits[i] == '1';
  return x;
}

}  // namespace qnas
