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

#include "qnas/milp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qnas/error.hpp"
#include "qnas/rng.hpp"
#include "qnas/textio.hpp"

namespace qnas {

void MilpInstance::validate() const {
  if (c.size() != num_vars || lower.size() != num_vars || upper.size() != num_vars || integral.size() != num_vars)
    throw InvalidArgument("MILP variable arrays disagree with n=" + std::to_string(num_vars));
  if (b.size() != num_cons) throw InvalidArgument("MILP rhs length disagrees with m=" + std::to_string(num_cons));
  for (std::size_t i = 0; i < num_vars; ++i) {
    if (std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] > upper[i])
      throw InvalidArgument("variable " + std::to_string(i) + " has l > u");
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] == HUGE_VAL || upper[i] == -HUGE_VAL)
      throw InvalidArgument("variable " + std::to_string(i) + " has an invalid bound");
    if (integral[i] > 1) throw InvalidArgument("integrality flag must be 0 or 1");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& e = a[k];
    if (e.row >= num_cons || e.col >= num_vars) throw InvalidArgument("A entry out of range");
    if (e.value == 0.0) throw InvalidArgument("A contains an explicit zero");
    if (k && !(a[k - 1].row < e.row || (a[k - 1].row == e.row && a[k - 1].col < e.col)))
      throw InvalidArgument("A entries must be sorted by (row, col) without duplicates");
  }
}

namespace {

template <class T>
bool bits_eq(const std::vector<T>& x, const std::vector<T>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if constexpr (std::is_same_v<T, double>) {
      if (std::bit_cast<std::uint64_t>(x[i]) != std::bit_cast<std::uint64_t>(y[i])) return false;
    } else if (!(x[i] == y[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool bit_equal(const MilpInstance& x, const MilpInstance& y) {
  if (x.num_vars != y.num_vars || x.num_cons != y.num_cons || x.a.size() != y.a.size()) return false;
  for (std::size_t k = 0; k < x.a.size(); ++k)
    if (x.a[k].row != y.a[k].row || x.a[k].col != y.a[k].col ||
        std::bit_cast<std::uint64_t>(x.a[k].value) != std::bit_cast<std::uint64_t>(y.a[k].value))
      return false;
  return bits_eq(x.c, y.c) && bits_eq(x.b, y.b) && bits_eq(x.lower, y.lower) && bits_eq(x.upper, y.upper) &&
         bits_eq(x.integral, y.integral);
}

BipartiteGraph encode_bipartite(const MilpInstance& milp) {
  milp.validate();
  BipartiteGraph bg;
  bg.vars.resize(milp.num_vars);
  for (std::size_t i = 0; i < milp.num_vars; ++i) {
    auto& f = bg.vars[i];
    f.c = milp.c[i];
    f.l_finite = std::isfinite(milp.lower[i]);
    f.l_val = f.l_finite ? milp.lower[i] : 0.0;
    f.u_finite = std::isfinite(milp.upper[i]);
    f.u_val = f.u_finite ? milp.upper[i] : 0.0;
    f.tau = milp.integral[i];
  }
  bg.cons = milp.b;
  bg.edges.reserve(milp.a.size());
  for (const auto& e : milp.a) bg.edges.push_back({e.col, e.row, e.value});
  return bg;
}

MilpInstance decode_bipartite(const BipartiteGraph& bg) {
  MilpInstance m;
  m.num_vars = bg.vars.size();
  m.num_cons = bg.cons.size();
  m.b = bg.cons;
  for (std::size_t i = 0; i < bg.vars.size(); ++i) {
    const auto& f = bg.vars[i];
    if ((!f.l_finite && f.l_val != 0.0) || (!f.u_finite && f.u_val != 0.0))
      throw InvalidArgument("variable node " + std::to_string(i) + ": infinite bound flag with nonzero value");
    if ((f.l_finite && !std::isfinite(f.l_val)) || (f.u_finite && !std::isfinite(f.u_val)))
      throw InvalidArgument("variable node " + std::to_string(i) + ": finite flag with non-finite value");
    m.c.push_back(f.c);
    m.lower.push_back(f.l_finite ? f.l_val : -HUGE_VAL);
    m.upper.push_back(f.u_finite ? f.u_val : HUGE_VAL);
    m.integral.push_back(f.tau);
  }
  for (const auto& e : bg.edges) {
    if (e.var >= m.num_vars || e.con >= m.num_cons) throw InvalidArgument("bipartite edge endpoint out of range");
    m.a.push_back({e.con, e.var, e.weight});
  }
  std::sort(m.a.begin(), m.a.end(),
            [](const MatrixEntry& x, const MatrixEntry& y) { return x.row != y.row ? x.row < y.row : x.col < y.col; });
  m.validate();
  return m;
}

MilpInstance gen_set_covering(std::size_t rows, std::size_t cols, double density, std::uint64_t seed) {
  if (rows == 0) throw InvalidArgument("set covering needs at least one row");
  if (cols < 2) throw InvalidArgument("set covering needs at least two columns");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must lie in (0,1]");
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> pick_col(0, static_cast<std::uint32_t>(cols - 1));
  std::uniform_int_distribution<int> cost(1, 100);

  MilpInstance m;
  m.num_vars = cols;
  m.num_cons = rows;
  for (std::size_t j = 0; j < cols; ++j) m.c.push_back(static_cast<double>(cost(rng)));
  std::vector<std::uint8_t> in_row(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::fill(in_row.begin(), in_row.end(), 0);
    std::size_t count = 0;
    for (std::size_t j = 0; j < cols; ++j)
      if (density >= 1.0 || unif(rng) < density) {
        in_row[j] = 1;
        ++count;
      }
    while (count < 2) {
      auto j = pick_col(rng);
      if (!in_row[j]) {
        in_row[j] = 1;
        ++count;
      }
    }
    for (std::size_t j = 0; j < cols; ++j)
      if (in_row[j]) m.a.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(j), -1.0});
  }
  m.b.assign(rows, -1.0);
  m.lower.assign(cols, 0.0);
  m.upper.assign(cols, 1.0);
  m.integral.assign(cols, 1);
  return m;
}

FeatureMatrices featurize(const BipartiteGraph& bg) {
  FeatureMatrices f;
  f.num_vars = bg.vars.size();
  f.var_features.reserve(bg.vars.size() * FeatureMatrices::kVarWidth);
  for (const auto& v : bg.vars) {
    f.var_features.push_back(v.c);
    f.var_features.push_back(v.l_val);
    f.var_features.push_back(v.l_finite ? 1.0 : 0.0);
    f.var_features.push_back(v.u_val);
    f.var_features.push_back(v.u_finite ? 1.0 : 0.0);
    f.var_features.push_back(static_cast<double>(v.tau));
  }
  f.con_features = bg.cons;
  f.edges = bg.edges;
  return f;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    s += ' ';
    s += textio::format_double(x);
  }
  return s;
}

std::vector<double> parse_row(std::string_view line, std::string_view tag, std::size_t count, std::size_t lineno) {
  auto tok = textio::split_ws(line);
  if (tok.empty() || tok[0] != tag) throw ParseError("expected '" + std::string(tag) + "' row", lineno);
  if (tok.size() != count + 1)
    throw ParseError("'" + std::string(tag) + "' row needs " + std::to_string(count) + " values", lineno);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    if (!textio::parse_double(tok[i + 1], out[i])) throw ParseError("bad number '" + std::string(tok[i + 1]) + "'", lineno);
  return out;
}

}  // namespace

std::string write_milp(const MilpInstance& milp) {
  milp.validate();
  std::string out = "milp " + std::to_string(milp.num_vars) + " " + std::to_string(milp.num_cons) + "\n";
  out += "c" + join(milp.c) + "\n";
  out += "b" + join(milp.b) + "\n";
  out += "l" + join(milp.lower) + "\n";
  out += "u" + join(milp.upper) + "\n";
  out += "tau";
  for (auto t : milp.integral) out += t ? " 1" : " 0";
  out += "\nnnz " + std::to_string(milp.a.size()) + "\n";
  for (const auto& e : milp.a)
    out += std::to_string(e.row) + " " + std::to_string(e.col) + " " + textio::format_double(e.value) + "\n";
  return out;
}

MilpInstance parse_milp(const std::string& text) {
  auto lines = textio::split_lines(text);
  if (lines.size() < 7) throw ParseError("truncated MILP file", lines.size());
  auto head = textio::split_ws(lines[0]);
  MilpInstance m;
  if (head.size() != 3 || head[0] != "milp" || !textio::parse_int(head[1], m.num_vars) ||
      !textio::parse_int(head[2], m.num_cons))
    throw ParseError("expected \"milp <n> <m>\"", 1);
  m.c = parse_row(lines[1], "c", m.num_vars, 2);
  m.b = parse_row(lines[2], "b", m.num_cons, 3);
  m.lower = parse_row(lines[3], "l", m.num_vars, 4);
  m.upper = parse_row(lines[4], "u", m.num_vars, 5);
  for (double t : parse_row(lines[5], "tau", m.num_vars, 6)) {
    if (t != 0.0 && t != 1.0) throw ParseError("tau entries must be 0 or 1", 6);
    m.integral.push_back(static_cast<std::uint8_t>(t));
  }
  auto nz = textio::split_ws(lines[6]);
  std::size_t nnz = 0;
  if (nz.size() != 2 || nz[0] != "nnz" || !textio::parse_int(nz[1], nnz)) throw ParseError("expected \"nnz <k>\"", 7);
  if (lines.size() < 7 + nnz) throw ParseError("expected " + std::to_string(nnz) + " entries", lines.size());
  for (std::size_t k = 0; k < nnz; ++k) {
    auto tok = textio::split_ws(lines[7 + k]);
    MatrixEntry e{};
    if (tok.size() != 3 || !textio::parse_int(tok[0], e.row) || !textio::parse_int(tok[1], e.col) ||
        !textio::parse_double(tok[2], e.value))
      throw ParseError("expected \"row col value\"", 8 + k);
    m.a.push_back(e);
  }
  try {
    m.validate();
  } catch (const InvalidArgument& ex) {
    throw ParseError(ex.what());
  }
  return m;
}

std::string write_bipartite(const BipartiteGraph& bg) {
  std::string out = "bipartite " + std::to_string(bg.vars.size()) + " " + std::to_string(bg.cons.size()) + " " +
                    std::to_string(bg.edges.size()) + "\n";
  for (const auto& v : bg.vars)
    out += "v " + textio::format_double(v.c) + " " + textio::format_double(v.l_val) + " " + (v.l_finite ? "1" : "0") +
           " " + textio::format_double(v.u_val) + " " + (v.u_finite ? "1" : "0") + " " + std::to_string(v.tau) + "\n";
  for (double b : bg.cons) out += "k " + textio::format_double(b) + "\n";
  for (const auto& e : bg.edges)
    out += "e " + std::to_string(e.var) + " " + std::to_string(e.con) + " " + textio::format_double(e.weight) + "\n";
  return out;
}

}  // namespace qnas
