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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qnas/ad/var.hpp"
#include "qnas/graph.hpp"

namespace qnas {

enum class TaskKind { kMaxCut, kMis, kGeneric };

struct Task {
  TaskKind kind = TaskKind::kGeneric;
  double penalty = 0.0;  // MIS only

  static Task maxcut() { return {TaskKind::kMaxCut, 0.0}; }
  static Task mis(double p) { return {TaskKind::kMis, p}; }
  static Task generic() { return {TaskKind::kGeneric, 0.0}; }
  bool operator==(const Task&) const = default;
};

std::string task_name(TaskKind kind);
TaskKind parse_task(const std::string& name);

inline constexpr double kDefaultMisPenalty = 2.0;

using BinaryAssignment = std::vector<std::uint8_t>;
using SoftAssignment = std::vector<double>;

// Symmetric Q with linear terms folded onto the diagonal (x_i^2 = x_i), so
// H(x) = x^T Q x. Off-diagonal entries are stored in both directions.
class QuboInstance {
 public:
  QuboInstance() = default;
  // Throws InvalidArgument unless `dense` is square and exactly symmetric.
  static QuboInstance from_dense(const std::vector<std::vector<double>>& dense, Task task);

  std::size_t size() const noexcept { return diag_.size(); }
  const Task& task() const noexcept { return task_; }
  double diag(std::size_t i) const { return diag_[i]; }
  double at(std::size_t i, std::size_t j) const;
  std::vector<std::vector<double>> dense() const;

  // Row i of the off-diagonal part (column ids ascending).
  std::size_t row_begin(std::size_t i) const { return offsets_[i]; }
  std::size_t row_end(std::size_t i) const { return offsets_[i + 1]; }
  std::uint32_t col(std::size_t k) const { return cols_[k]; }
  double val(std::size_t k) const { return vals_[k]; }

  // (Qx)_i for a real vector.
  std::vector<double> multiply(const std::vector<double>& x) const;

  const std::shared_ptr<const Graph>& source_graph() const noexcept { return graph_; }
  // Graph the GNN runs on: the source graph, or the off-diagonal support.
  std::shared_ptr<const Graph> interaction_graph() const;

 private:
  friend QuboInstance qubo_from_maxcut(const Graph&);
  friend QuboInstance qubo_from_mis(const Graph&, double);
  static QuboInstance from_pairs(std::size_t n, std::vector<double> diag,
                                 const std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, double>>& upper,
                                 Task task);

  std::vector<double> diag_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  Task task_;
  std::shared_ptr<const Graph> graph_;
};

// Q_ij = A_ij (i != j), Q_ii = -sum_j A_ij.
QuboInstance qubo_from_maxcut(const Graph& g);
// Q_ii = -1, Q_ij = P/2 on edges. P <= 1 is rejected: the unconstrained
// optimum may then violate independence.
QuboInstance qubo_from_mis(const Graph& g, double penalty = kDefaultMisPenalty);
QuboInstance qubo_for_task(const Graph& g, const Task& task);

double hamiltonian(const QuboInstance& q, const BinaryAssignment& x);
double hamiltonian(const QuboInstance& q, const std::vector<double>& p);

// p^T Q p on the autodiff tape; p is n x 1. Gradient is 2 Q p.
ad::Var relaxed_hamiltonian(const QuboInstance& q, const ad::Var& p);

// x_i = 1 iff p_i >= threshold. For MIS the result is then repaired: edges
// are scanned in order and the lower-probability endpoint of any violated
// edge is dropped (ties drop the larger id).
BinaryAssignment round_assignment(const SoftAssignment& p, double threshold = 0.5);
BinaryAssignment round_assignment(const SoftAssignment& p, const Task& task, const Graph& g,
                                  double threshold = 0.5);

bool is_independent(const Graph& g, const BinaryAssignment& x);

struct TaskScore {
  double value = 0.0;
  bool valid = true;
};

// MaxCut: weight of cut edges. MIS: |x| when independent, else valid=false.
// Generic tasks have no graph objective and throw InvalidArgument.
TaskScore task_metric(const Graph& g, const Task& task, const BinaryAssignment& x);
double cut_value(const Graph& g, const BinaryAssignment& x);

struct OracleResult {
  BinaryAssignment x;
  double value = 0.0;
};

inline constexpr std::size_t kBruteForceMaxVars = 24;

// Exhaustive minimum of x^T Q x; ties go to the lexicographically smallest x
// (x_0 most significant). Refuses n > 24. `jobs` splits the enumeration.
OracleResult brute_force_optimum(const QuboInstance& q, unsigned jobs = 1);

// Text format: "qubo <task> [penalty]" line, then n, then n rows of Q.
std::string write_qubo(const QuboInstance& q);
QuboInstance parse_qubo(const std::string& text);

// Assignment file: "n" line then one line of '0'/'1' characters.
std::string write_assignment(const BinaryAssignment& x);
BinaryAssignment parse_assignment(const std::string& text);

}  // namespace qnas
