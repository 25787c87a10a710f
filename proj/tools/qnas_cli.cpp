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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qnas/bench/bench.hpp"
#include "qnas/error.hpp"
#include "qnas/gnn/arch.hpp"
#include "qnas/graph.hpp"
#include "qnas/milp.hpp"
#include "qnas/nas/hparams.hpp"
#include "qnas/nas/search.hpp"
#include "qnas/qubo.hpp"
#include "qnas/textio.hpp"

namespace fs = std::filesystem;
using namespace qnas;

namespace {

// Bad or missing command-line arguments; reported with exit status 1.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

struct Options {
  std::string task = "maxcut";
  double penalty = kDefaultMisPenalty;
  std::string graph;
  std::string random;
  std::string qubo;
  std::string config;
  std::string arch = "gcn_default";
  std::string method = "gnn";
  std::string assignment;
  std::string milp;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::size_t budget = 0;
  unsigned jobs = 1;
  std::string out = ".";
};

// Loaded problem plus the name used in result rows and file names.
struct Problem {
  std::string name;
  std::optional<Graph> graph;
  QuboInstance q;
};

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) c = '_';
  return s;
}

Task task_of(const Options& o) {
  switch (parse_task(o.task)) {
    case TaskKind::kMaxCut: return Task::maxcut();
    case TaskKind::kMis: return Task::mis(o.penalty);
    case TaskKind::kGeneric: return Task::generic();
  }
  return Task::generic();
}

Graph load_graph(const Options& o, std::string& name) {
  if (!o.graph.empty() && !o.random.empty()) throw UsageError("--graph and --random are exclusive");
  if (!o.graph.empty()) {
    name = fs::path(o.graph).stem().string();
    return load_gset(o.graph);
  }
  if (!o.random.empty()) {
    name = sanitize(o.random) + "_s" + std::to_string(o.seed);
    return gen_from_string(o.random, o.seed);
  }
  throw UsageError("one of --graph, --random or --qubo is required");
}

Problem load_problem(const Options& o) {
  Problem p;
  if (!o.qubo.empty()) {
    p.name = fs::path(o.qubo).stem().string();
    p.q = parse_qubo(textio::read_file(o.qubo));
    return p;
  }
  p.graph = load_graph(o, p.name);
  p.q = qubo_for_task(*p.graph, task_of(o));
  return p;
}

nas::SearchConfig load_config(const Options& o) {
  nas::SearchConfig c;
  if (!o.config.empty()) c = nas::parse_search_config(textio::read_file(o.config));
  c.seed = o.seed;
  c.validate();
  return c;
}

class Run {
 public:
  Run(std::string command, const Options& o, int argc, char** argv) : o_(o) {
    m_.command = std::move(command);
    m_.argv.assign(argv, argv + argc);
    m_.config_path = o.config;
    m_.seeds = {o.seed};
    m_.out_dir = o.out;
    m_.started_utc = bench::utc_now();
    fs::create_directories(o.out);
  }

  void instance(const std::string& spec) { m_.instances.push_back(spec); }

  fs::path write(const std::string& file, const std::string& contents) {
    auto path = fs::path(o_.out) / file;
    textio::write_file_atomic(path, contents);
    m_.artifacts.push_back({path.string(), bench::hex64(bench::fnv1a64(contents))});
    return path;
  }

  // Merges rows into <out>/results.csv, replacing rows with the same key.
  void add_rows(const std::vector<bench::ResultRow>& rows) {
    auto path = fs::path(o_.out) / "results.csv";
    std::vector<bench::ResultRow> all;
    if (fs::exists(path)) all = bench::parse_csv(textio::read_file(path));
    for (const auto& r : rows) {
      std::erase_if(all, [&](const bench::ResultRow& x) {
        return x.instance == r.instance && x.method == r.method && x.seed == r.seed;
      });
      all.push_back(r);
    }
    write("results.csv", bench::write_csv(all));
  }

  void finish() {
    m_.finished_utc = bench::utc_now();
    auto text = bench::manifest_to_json(m_);
    textio::write_file_atomic(fs::path(o_.out) / ("manifest." + m_.command + ".json"), text);
  }

 private:
  const Options& o_;
  bench::RunManifest m_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string problem_spec(const Options& o) { return !o.qubo.empty() ? o.qubo : !o.graph.empty() ? o.graph : o.random; }

std::string objective_label(const QuboInstance& q) {
  switch (q.task().kind) {
    case TaskKind::kMaxCut: return "cut";
    case TaskKind::kMis: return "size";
    case TaskKind::kGeneric: return "H";
  }
  return "H";
}

void print_score(const QuboInstance& q, const BinaryAssignment& x) {
  auto s = nas::objective(q, x);
  std::cout << "H=" << textio::format_double(hamiltonian(q, x)) << " " << objective_label(q) << "="
            << textio::format_double(s.value) << " valid=" << (s.valid ? "true" : "false") << "\n";
}

bench::ResultRow row_for(const Problem& p, const std::string& method, double objective, double seconds,
                         std::uint64_t seed) {
  return {p.name, p.q.size(), p.graph ? p.graph->num_edges() : 0, method, objective, seconds, seed};
}

// ---- commands ----------------------------------------------------------

std::map<std::string, std::string> parse_kv(const std::string& s) {
  std::map<std::string, std::string> kv;
  std::size_t start = 0;
  while (start < s.size()) {
    auto end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    auto item = s.substr(start, end - start);
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in '" + s + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
    start = end + 1;
  }
  return kv;
}

MilpInstance setcover_from_spec(const std::string& spec, std::uint64_t seed) {
  const std::string prefix = "setcover:";
  if (spec.rfind(prefix, 0) != 0) throw ParseError("MILP spec must look like setcover:rows=R,cols=C,density=D");
  auto kv = parse_kv(spec.substr(prefix.size()));
  std::size_t rows = 0, cols = 0;
  double density = 0.0;
  if (!kv.count("rows") || !kv.count("cols") || !kv.count("density") || !textio::parse_int(kv["rows"], rows) ||
      !textio::parse_int(kv["cols"], cols) || !textio::parse_double(kv["density"], density))
    throw ParseError("setcover spec needs integer rows, cols and a real density");
  return gen_set_covering(rows, cols, density, seed);
}

void cmd_gen(const Options& o, Run& run) {
  if (o.random.empty()) throw UsageError("gen needs --random SPEC");
  for (std::size_t i = 0; i < o.count; ++i) {
    const std::uint64_t seed = o.count == 1 ? o.seed : derive_seed(o.seed, i);
    const std::string name = sanitize(o.random) + "_s" + std::to_string(seed);
    run.instance(o.random + " seed=" + std::to_string(seed));
    if (o.random.rfind("setcover:", 0) == 0) {
      run.write(name + ".milp", write_milp(setcover_from_spec(o.random, seed)));
    } else {
      run.write(name + ".gset", write_gset(gen_from_string(o.random, seed)));
    }
    std::cout << (fs::path(o.out) / name).string() << "\n";
  }
}

void cmd_encode(const Options& o, Run& run) {
  MilpInstance m;
  std::string name;
  if (!o.milp.empty()) {
    m = parse_milp(textio::read_file(o.milp));
    name = fs::path(o.milp).stem().string();
  } else if (!o.random.empty()) {
    m = setcover_from_spec(o.random, o.seed);
    name = sanitize(o.random) + "_s" + std::to_string(o.seed);
  } else {
    throw UsageError("encode needs --milp FILE or --random setcover:...");
  }
  run.instance(o.milp.empty() ? o.random : o.milp);
  auto bg = encode_bipartite(m);
  run.write(name + ".bipartite", write_bipartite(bg));
  std::cout << "vars=" << bg.vars.size() << " cons=" << bg.cons.size() << " edges=" << bg.edges.size() << "\n";
}

void cmd_train(const Options& o, Run& run) {
  auto p = load_problem(o);
  run.instance(problem_spec(o));
  const auto t0 = std::chrono::steady_clock::now();
  BinaryAssignment x;
  std::string method;
  if (o.method == "greedy") {
    if (!p.graph) throw UsageError("the greedy baseline needs a graph instance");
    x = bench::baseline_greedy(*p.graph, p.q.task());
    method = "greedy";
  } else if (o.method == "gnn") {
    auto cfg = load_config(o);
    auto arch = gnn::load_arch(o.arch);
    auto r = nas::train_fixed(p.q, arch, cfg);
    x = r.assignment;
    method = fs::path(o.arch).stem().string();
    nas::TrialResult t;
    t.arch = arch;
    t.config = cfg;
    t.metric = r.final_metric;
    t.hamiltonian = r.hamiltonian;
    auto s = nas::objective(p.q, x);
    t.objective = s.value;
    t.valid = s.valid;
    t.seconds = seconds_since(t0);
    t.seed = o.seed;
    t.epochs_run = r.epochs_run;
    t.assignment = x;
    run.write(p.name + "." + method + ".s" + std::to_string(o.seed) + ".json", nas::trial_to_json(t));
  } else {
    throw UsageError("--method must be gnn or greedy");
  }
  const double secs = seconds_since(t0);
  run.write(p.name + "." + method + ".s" + std::to_string(o.seed) + ".x", write_assignment(x));
  run.add_rows({row_for(p, method, nas::objective(p.q, x).value, secs, o.seed)});
  print_score(p.q, x);
}

void cmd_search(const Options& o, Run& run) {
  auto p = load_problem(o);
  run.instance(problem_spec(o));
  auto cfg = load_config(o);
  const auto t0 = std::chrono::steady_clock::now();
  nas::TrialResult best;
  std::string method = "search";
  if (o.budget > 0) {
    auto r = nas::hyperparameter_search(p.q, nas::HyperparameterSpace{}, o.budget, cfg, o.jobs);
    for (std::size_t i = 0; i < r.trials.size(); ++i)
      run.write(p.name + ".trial" + std::to_string(i) + ".json", nas::trial_to_json(r.trials[i]));
    for (const auto& f : r.failures) std::cerr << "warning: trial failed: " << f << "\n";
    best = r.best;
    method = "search+hparams";
  } else {
    best = nas::search(p.q, cfg);
  }
  const double secs = seconds_since(t0);
  const std::string stem = p.name + "." + method + ".s" + std::to_string(o.seed);
  run.write(stem + ".arch", gnn::write_arch(best.arch));
  run.write(stem + ".json", nas::trial_to_json(best));
  run.write(stem + ".x", write_assignment(best.assignment));
  run.add_rows({row_for(p, method, best.objective, secs, o.seed)});
  std::cout << gnn::write_arch(best.arch);
  print_score(p.q, best.assignment);
}

void cmd_eval(const Options& o) {
  auto p = load_problem(o);
  if (o.assignment.empty()) throw UsageError("eval needs --assignment FILE");
  auto x = parse_assignment(textio::read_file(o.assignment));
  if (x.size() != p.q.size())
    throw InvalidArgument("assignment has " + std::to_string(x.size()) + " entries, instance has " +
                          std::to_string(p.q.size()));
  print_score(p.q, x);
  if (p.q.task().kind == TaskKind::kMaxCut)
    for (const auto& m : bench::reference_methods())
      if (auto v = bench::reference_value(p.name, m))
        std::cout << m << " [reported]: " << textio::format_double(*v) << "\n";
}

void cmd_oracle(const Options& o) {
  auto p = load_problem(o);
  auto r = brute_force_optimum(p.q, o.jobs);
  std::cout << "H*=" << textio::format_double(r.value) << " " << objective_label(p.q) << "="
            << textio::format_double(nas::objective(p.q, r.x).value) << "\n";
  std::string bits;
  for (auto b : r.x) bits += b ? '1' : '0';
  std::cout << "x=" << bits << "\n";
}

void cmd_report(const Options& o, Run& run) {
  if (o.inputs.empty()) throw UsageError("report needs --inputs CSV...");
  std::vector<bench::ResultRow> rows;
  for (const auto& f : o.inputs) {
    run.instance(f);
    auto part = bench::parse_csv(textio::read_file(f));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  run.write("report.csv", bench::write_csv(rows));
  auto table = bench::format_table(rows);
  run.write("report.txt", table);
  std::cout << table;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"QUBO / MILP graph encodings, GNN training and architecture search"};
  app.require_subcommand(1);

  auto add_problem = [&](CLI::App* c) {
    c->add_option("--task", o.task, "maxcut | mis")->check(CLI::IsMember({"maxcut", "mis"}));
    c->add_option("--penalty", o.penalty, "MIS penalty P (> 1)");
    c->add_option("--graph", o.graph, "Gset file");
    c->add_option("--random", o.random, "generator spec, e.g. er:n=50,p=0.1 or regular:n=100,d=3");
    c->add_option("--qubo", o.qubo, "QUBO text file");
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "master seed");
    c->add_option("--out", o.out, "output directory");
  };

  auto* gen = app.add_subcommand("gen", "generate graph or set-covering instances");
  gen->add_option("--random", o.random, "er:n=..,p=.. | regular:n=..,d=.. | torus:rows=..,cols=.. | setcover:rows=..,cols=..,density=..")
      ->required();
  gen->add_option("--count", o.count, "number of instances")->check(CLI::PositiveNumber);
  add_common(gen);

  auto* encode = app.add_subcommand("encode", "write the bipartite encoding of a MILP");
  encode->add_option("--milp", o.milp, "MILP text file");
  encode->add_option("--random", o.random, "setcover:rows=..,cols=..,density=..");
  add_common(encode);

  auto* train = app.add_subcommand("train", "train a fixed architecture (or run the greedy baseline)");
  add_problem(train);
  add_common(train);
  train->add_option("--config", o.config, "search/training config JSON");
  train->add_option("--arch", o.arch, "architecture file or gcn_default");
  train->add_option("--method", o.method, "gnn | greedy")->check(CLI::IsMember({"gnn", "greedy"}));

  auto* search = app.add_subcommand("search", "architecture search, optionally followed by hyperparameter search");
  add_problem(search);
  add_common(search);
  search->add_option("--config", o.config, "search config JSON");
  search->add_option("--budget", o.budget, "hyperparameter trials after the architecture stage (0 = none)");
  search->add_option("--jobs", o.jobs, "concurrent trials")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "score a stored assignment");
  add_problem(eval);
  eval->add_option("--assignment", o.assignment, "assignment file")->required();
  eval->add_option("--seed", o.seed, "seed for --random instances");

  auto* oracle = app.add_subcommand("oracle", "exhaustive optimum (n <= 24)");
  add_problem(oracle);
  oracle->add_option("--seed", o.seed, "seed for --random instances");
  oracle->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "merge result CSVs into one CSV and an aligned table");
  report->add_option("--inputs", o.inputs, "result CSV files")->required();
  report->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "eval") {
      cmd_eval(o);
    } else if (name == "oracle") {
      cmd_oracle(o);
    } else {
      Run run(name, o, argc, argv);
      if (name == "gen") cmd_gen(o, run);
      else if (name == "encode") cmd_encode(o, run);
      else if (name == "train") cmd_train(o, run);
      else if (name == "search") cmd_search(o, run);
      else if (name == "report") cmd_report(o, run);
      run.finish();
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
