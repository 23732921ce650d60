// qobdd command-line tool.
//
// Exit codes: 0 ok, 1 usage or input error, 2 check failure,
// 3 expectation mismatch, 4 resource budget exceeded.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "qobdd/generators.hpp"
#include "qobdd/proof.hpp"
#include "qobdd/rectangles.hpp"
#include "qobdd/solver.hpp"
#include "qobdd/strategy.hpp"

using json = nlohmann::ordered_json;
using namespace qobdd;

namespace {

enum Exit : int { Ok = 0, Usage = 1, CheckFailed = 2, Mismatch = 3, Budget = 4 };

struct Global {
  std::uint64_t seed = 0;
  bool json = false;
  std::size_t budget = Manager::kDefaultBudget;
  unsigned threads = 1;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path);
  out << text;
}

void print_json(const json &j) { std::cout << j.dump(2) << '\n'; }

std::string literals(const Pcnf &f, const Assignment &a) {
  std::string s;
  for (const auto &e : f.prefix()) {
    if (!s.empty())
      s += ' ';
    s += (a[e.var] ? "" : "-") + std::to_string(e.var);
  }
  return s;
}

// gen

struct GenArgs {
  std::string family;
  std::size_t n = 0;
  std::string graph, out;
  std::size_t degree = 0;
};

int cmd_gen(const Global &g, const GenArgs &a) {
  Pcnf f = [&] {
    if (a.family == "quparity" || a.family == "eqprime") {
      if (a.n < 2)
        throw CLI::ValidationError("n", "must be at least 2");
      return a.family == "quparity" ? gen_quparity(a.n) : gen_eqprime(a.n);
    }
    Graph gr;
    if (!a.graph.empty())
      gr = read_edge_list(read_file(a.graph));
    else if (a.degree > 0)
      gr = random_dregular(a.n, a.degree, g.seed);
    else {
      if (a.n < 1)
        throw CLI::ValidationError("n", "must be at least 1");
      gr = Graph(2 * a.n);
      for (Vertex i = 1; i <= a.n; ++i)
        gr.add_edge(2 * i - 1, 2 * i);
    }
    return gen_ipg_qbf(gr);
  }();
  const std::string text = to_qdimacs(f);
  if (g.json) {
    json j{{"family", a.family}, {"n", a.n},           {"seed", g.seed},
           {"vars", f.num_vars()}, {"clauses", f.clauses().size()}};
    if (a.out.empty())
      j["qdimacs"] = text;
    else
      write_output(a.out, text);
    print_json(j);
  } else {
    write_output(a.out, text);
  }
  return Ok;
}

// solve

struct SolveArgs {
  std::string input, order = "pathwidth", proof, stats, expect;
};

VarOrder parse_order_option(const Pcnf &f, const std::string &spec) {
  if (spec == "prefix")
    return solver_order(f, OrderPolicy::Prefix);
  if (spec == "pathwidth")
    return solver_order(f, OrderPolicy::Pathwidth);
  if (spec.rfind("given:", 0) == 0) {
    std::istringstream in(read_file(spec.substr(6)));
    std::vector<Var> vars;
    std::string tok;
    while (in >> tok) {
      if (tok == "o")
        continue;
      try {
        vars.push_back(static_cast<Var>(std::stoul(tok)));
      } catch (const std::exception &) {
        throw Error("order file: bad variable '" + tok + "'");
      }
    }
    return VarOrder(std::move(vars));
  }
  throw CLI::ValidationError("--order", "expected prefix, pathwidth or given:<file>");
}

json stats_json(const SolveResult &r, const std::string &order) {
  return json{{"value", r.value},
              {"order", order},
              {"max_width", r.stats.max_width},
              {"trace_nodes", r.stats.trace_nodes},
              {"trace_size", r.stats.trace_size},
              {"trace_lines", r.stats.trace_lines},
              {"eliminations", r.stats.eliminations},
              {"wall_time_ms", r.stats.wall_time_ms}};
}

int cmd_solve(const Global &g, const SolveArgs &a) {
  const Pcnf f = parse_qdimacs(read_file(a.input));
  const VarOrder pi = parse_order_option(f, a.order);
  SolveOptions opts;
  opts.node_budget = g.budget;
  opts.emit_trace = !a.proof.empty();
  const SolveResult r = solve(f, pi, opts);
  if (!a.proof.empty())
    write_output(a.proof, trace_to_string(*r.trace));
  const json stats = stats_json(r, a.order);
  if (!a.stats.empty())
    write_output(a.stats, stats.dump(2) + "\n");
  if (g.json)
    print_json(stats);
  else
    std::cout << (r.value ? "TRUE" : "FALSE") << '\n';
  if (!a.expect.empty() && (a.expect == "true") != r.value)
    return Mismatch;
  return Ok;
}

// check

struct CheckArgs {
  std::string formula, trace;
  bool refutation = false;
};

int cmd_check(const Global &g, const CheckArgs &a) {
  const Pcnf f = parse_qdimacs(read_file(a.formula));
  CheckOptions opts;
  opts.node_budget = g.budget;
  const std::string text = read_file(a.trace);
  Verdict v = check_trace_text(f, text, opts);
  bool refutes = false;
  if (v.accepted)
    refutes = is_refutation(f, parse_trace(text), opts);
  if (v.accepted && a.refutation && !refutes) {
    v.accepted = false;
    v.detail = "trace does not end in the 0-sink";
  }
  if (g.json) {
    print_json({{"accepted", v.accepted},
                {"refutation", refutes},
                {"line", v.line},
                {"reason", reason_code(v.reason)},
                {"detail", v.detail}});
  } else if (v.accepted) {
    std::cout << (refutes ? "ACCEPTED refutation" : "ACCEPTED") << '\n';
  } else {
    std::cout << "REJECTED line " << v.line << ' ' << reason_code(v.reason);
    if (!v.detail.empty())
      std::cout << ": " << v.detail;
    std::cout << '\n';
  }
  if (v.accepted)
    return Ok;
  return v.reason == Reason::BudgetExceeded ? Budget : CheckFailed;
}

// extract

struct ExtractArgs {
  std::string formula, trace, out;
};

int cmd_extract(const Global &g, const ExtractArgs &a) {
  const Pcnf f = parse_qdimacs(read_file(a.formula));
  const ProofTrace t = parse_trace(read_file(a.trace));
  CheckOptions opts;
  opts.node_budget = g.budget;
  const Replay r = replay_trace(f, t, opts);
  if (!r.refutation()) {
    std::cerr << "error: not an accepted refutation";
    if (!r.verdict.accepted)
      std::cerr << " (line " << r.verdict.line << ' ' << reason_code(r.verdict.reason) << ')';
    std::cerr << '\n';
    return r.verdict.reason == Reason::BudgetExceeded ? Budget : CheckFailed;
  }
  const DecisionListFamily fam = extract(f, t, r);
  const std::string text = strategy_to_string(fam);
  if (g.json) {
    json lists = json::array();
    for (const auto &[u, dl] : fam.lists)
      lists.push_back({{"var", u}, {"length", dl.length()}, {"width", dl.width()},
                       {"guard_sizes", dl.guard_sizes()}, {"guard_widths", dl.guard_widths()}});
    json j{{"lists", lists}};
    if (a.out.empty())
      j["strategy"] = text;
    else
      write_output(a.out, text);
    print_json(j);
  } else {
    write_output(a.out, text);
  }
  return Ok;
}

// verify

struct VerifyArgs {
  std::string formula, strategy;
  std::size_t limit = 16, samples = 100'000;
  bool range = false;
};

int cmd_verify(const Global &g, const VerifyArgs &a) {
  const Pcnf f = parse_qdimacs(read_file(a.formula));
  const DecisionListFamily fam = parse_strategy(read_file(a.strategy));
  if (auto bad = fam.audit(f)) {
    std::cerr << "error: invalid strategy: " << *bad << '\n';
    return CheckFailed;
  }
  VerifyOptions opts;
  opts.exhaustive_limit = a.limit;
  opts.samples = a.samples;
  opts.seed = g.seed;
  opts.threads = g.threads;
  const WinningReport w = verify_winning(f, fam, opts);
  std::optional<std::uint64_t> range;
  if (a.range)
    range = strategy_range_size(f, fam);
  if (g.json) {
    json j{{"winning", w.winning}, {"exhaustive", w.exhaustive}, {"checked", w.checked}, {"seed", g.seed}};
    if (w.counterexample)
      j["counterexample"] = literals(f, *w.counterexample);
    if (range)
      j["range"] = *range;
    print_json(j);
  } else {
    if (w.winning)
      std::cout << "WINNING\n";
    else
      std::cout << "COUNTEREXAMPLE " << literals(f, *w.counterexample) << '\n';
    if (range)
      std::cout << "range " << *range << '\n';
  }
  return w.winning ? Ok : CheckFailed;
}

// bench

struct BenchArgs {
  std::string family;
  std::size_t from = 2, to = 10, step = 1;
  std::vector<std::string> orders{"hint"};
  bool timing = false;
};

int cmd_bench(const Global &g, const BenchArgs &a) {
  if (a.family != "quparity" && a.family != "eqprime")
    throw CLI::ValidationError("family", "expected quparity or eqprime");
  if (a.from < 2 || a.to < a.from || a.step == 0)
    throw CLI::ValidationError("range", "expected 2 <= from <= to and step >= 1");
  const Family fam = a.family == "quparity" ? Family::QUParity : Family::EqPrime;
  for (const auto &o : a.orders)
    if (o != "hint" && o != "pathwidth" && o != "prefix")
      throw CLI::ValidationError("--orders", "expected hint, pathwidth or prefix");

  struct Job {
    std::size_t n;
    std::string order;
    WidthPoint point;
    std::string error;
  };
  std::vector<Job> jobs;
  for (std::size_t n = a.from; n <= a.to; n += a.step)
    for (const auto &o : a.orders)
      jobs.push_back({n, o, {}, {}});

  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next == jobs.size())
          return;
        i = next++;
      }
      Job &job = jobs[i];
      try {
        const Pcnf f = make_family(fam, job.n);
        const VarOrder pi = job.order == "hint"     ? decomposition_order(f, family_decomposition(fam, job.n))
                            : job.order == "prefix" ? solver_order(f, OrderPolicy::Prefix)
                                                    : solver_order(f, OrderPolicy::Pathwidth);
        SolveOptions opts;
        opts.emit_trace = false;
        opts.node_budget = g.budget;
        const SolveResult r = solve(f, pi, opts);
        job.point = {job.n, r.value, r.stats.max_width, r.stats.trace_nodes, r.stats.trace_size,
                     r.stats.wall_time_ms};
      } catch (const BudgetExceeded &) {
        job.error = "budget";
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::max(1u, g.threads); ++t)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();

  bool over_budget = false;
  if (g.json) {
    json rows = json::array();
    for (const auto &j : jobs) {
      json row{{"family", a.family}, {"n", j.n}, {"order", j.order}};
      if (!j.error.empty()) {
        row["error"] = j.error;
        over_budget = true;
      } else {
        row["value"] = j.point.value;
        row["max_width"] = j.point.max_width;
        row["trace_nodes"] = j.point.trace_nodes;
        row["trace_size"] = j.point.trace_size;
        if (a.timing)
          row["wall_time_ms"] = j.point.wall_time_ms;
      }
      rows.push_back(row);
    }
    print_json(rows);
  } else {
    std::cout << std::left << std::setw(10) << "family" << std::setw(6) << "n" << std::setw(11) << "order"
              << std::setw(7) << "value" << std::setw(11) << "max_width" << std::setw(13) << "trace_nodes"
              << "trace_size";
    if (a.timing)
      std::cout << "  time_ms";
    std::cout << '\n';
    for (const auto &j : jobs) {
      std::cout << std::setw(10) << a.family << std::setw(6) << j.n << std::setw(11) << j.order;
      if (!j.error.empty()) {
        std::cout << "budget exceeded\n";
        over_budget = true;
        continue;
      }
      std::cout << std::setw(7) << (j.point.value ? "TRUE" : "FALSE") << std::setw(11) << j.point.max_width
                << std::setw(13) << j.point.trace_nodes << j.point.trace_size;
      if (a.timing)
        std::cout << "  " << std::fixed << std::setprecision(2) << j.point.wall_time_ms;
      std::cout << '\n';
    }
  }
  return over_budget ? Budget : Ok;
}

// rect analyze

struct RectArgs {
  std::string graph, partition = "pairs", report;
};

Partition read_partition(const std::string &spec, std::size_t n, std::uint64_t seed) {
  if (spec == "pairs")
    return pair_partition(n);
  if (spec.rfind("random:", 0) == 0 || spec == "random") {
    std::uint64_t s = seed;
    if (spec.size() > 7) {
      try {
        s = std::stoull(spec.substr(7));
      } catch (const std::exception &) {
        throw CLI::ValidationError("--partition", "bad seed in " + spec);
      }
    }
    std::mt19937_64 rng(s);
    return random_partition(n, rng);
  }
  // Two lines: the vertices of X1, then those of X2.
  std::istringstream in(read_file(spec));
  Partition p;
  std::string line;
  int side = 0;
  while (side < 2 && std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'c')
      continue;
    std::istringstream ls(line);
    Vertex v;
    while (ls >> v)
      (side == 0 ? p.x1 : p.x2).push_back(v);
    ++side;
  }
  std::vector<Vertex> all = p.x1;
  all.insert(all.end(), p.x2.begin(), p.x2.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i] != i + 1)
      throw Error("partition file must split the vertices 1.." + std::to_string(n));
  if (all.size() != n)
    throw Error("partition file must split the vertices 1.." + std::to_string(n));
  return p;
}

int cmd_rect(const Global &g, const RectArgs &a) {
  const Graph gr = read_edge_list(read_file(a.graph));
  const Partition part = read_partition(a.partition, gr.vertex_count(), g.seed);
  const RectangleReport r = check_rectanglesmall(gr, part);
  json matching = json::array();
  for (auto [x, y] : r.matching.edges)
    matching.push_back({x, y});
  const json j{{"n", r.n},
               {"m", r.m},
               {"bound", r.bound},
               {"oracle_max", r.oracle.size},
               {"holds", r.holds},
               {"balance", r.balance},
               {"protocol_lower_bound", r.protocol_lower_bound},
               {"x1", part.x1},
               {"x2", part.x2},
               {"matching", matching},
               {"witness", {{"color", r.oracle.color ? 1 : 0}, {"rows", r.oracle.rows}, {"cols", r.oracle.cols}}},
               {"seed", g.seed}};
  if (!a.report.empty())
    write_output(a.report, j.dump(2) + "\n");
  if (g.json) {
    print_json(j);
  } else {
    std::cout << "n " << r.n << "\nm " << r.m << "\nbound " << r.bound << "\noracle_max " << r.oracle.size
              << "\nbalance " << r.balance << "\nholds " << (r.holds ? "yes" : "no") << '\n';
  }
  return r.holds ? Ok : CheckFailed;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Symbolic QBF toolkit: OBDD-based solving, proof checking and strategy extraction"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--budget", g.budget, "Node budget per OBDD manager")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str();

  GenArgs gen;
  auto *gen_cmd = app.add_subcommand("gen", "Generate a formula family as QDIMACS");
  gen_cmd->add_option("family", gen.family)->required()->check(CLI::IsMember({"quparity", "eqprime", "ipg"}));
  gen_cmd->add_option("n", gen.n, "Size parameter (ipg: number of pairs, or vertices with --degree)");
  gen_cmd->add_option("--graph", gen.graph, "ipg: edge-list file");
  gen_cmd->add_option("--degree", gen.degree, "ipg: random regular graph of this degree on n vertices");
  gen_cmd->add_option("-o,--out", gen.out, "Output file");

  SolveArgs sol;
  auto *solve_cmd = app.add_subcommand("solve", "Solve a QDIMACS formula");
  solve_cmd->add_option("input", sol.input)->required();
  solve_cmd->add_option("--order", sol.order, "prefix | pathwidth | given:<file>")->capture_default_str();
  solve_cmd->add_option("--proof", sol.proof, "Write the derivation trace");
  solve_cmd->add_option("--stats", sol.stats, "Write statistics as JSON");
  solve_cmd->add_option("--expect", sol.expect, "Expected value")->check(CLI::IsMember({"true", "false"}));

  CheckArgs chk;
  auto *check_cmd = app.add_subcommand("check", "Check a derivation trace against a formula");
  check_cmd->add_option("formula", chk.formula)->required();
  check_cmd->add_option("trace", chk.trace)->required();
  check_cmd->add_flag("--refutation", chk.refutation, "Also require the trace to end in 0");

  ExtractArgs ext;
  auto *extract_cmd = app.add_subcommand("extract", "Extract a universal strategy from a refutation");
  extract_cmd->add_option("formula", ext.formula)->required();
  extract_cmd->add_option("trace", ext.trace)->required();
  extract_cmd->add_option("-o,--out", ext.out, "Strategy file");

  VerifyArgs ver;
  auto *verify_cmd = app.add_subcommand("verify", "Check that a strategy wins");
  verify_cmd->add_option("formula", ver.formula)->required();
  verify_cmd->add_option("strategy", ver.strategy)->required();
  verify_cmd->add_option("--limit", ver.limit, "Max existentials for exhaustive checking")->capture_default_str();
  verify_cmd->add_option("--samples", ver.samples, "Samples beyond the limit")->capture_default_str();
  verify_cmd->add_flag("--range", ver.range, "Also count distinct universal responses");

  BenchArgs bench;
  auto *bench_cmd = app.add_subcommand("bench", "Widths and trace sizes over a range of n");
  bench_cmd->add_option("family", bench.family)->required()->check(CLI::IsMember({"quparity", "eqprime"}));
  bench_cmd->add_option("--from", bench.from)->capture_default_str();
  bench_cmd->add_option("--to", bench.to)->capture_default_str();
  bench_cmd->add_option("--step", bench.step)->capture_default_str();
  bench_cmd->add_option("--orders", bench.orders, "hint, pathwidth, prefix")->delimiter(',');
  bench_cmd->add_flag("--timing", bench.timing, "Include wall-clock times");

  RectArgs rect;
  auto *rect_cmd = app.add_subcommand("rect", "Rectangle bounds");
  rect_cmd->require_subcommand(1);
  auto *analyze_cmd = rect_cmd->add_subcommand("analyze", "Max monochromatic rectangle of IP_G against 2^(n-m)");
  analyze_cmd->add_option("--graph", rect.graph, "Edge-list file")->required();
  analyze_cmd->add_option("--partition", rect.partition, "file | pairs | random:<seed>")->capture_default_str();
  analyze_cmd->add_option("--report", rect.report, "Write the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (*gen_cmd)
      return cmd_gen(g, gen);
    if (*solve_cmd)
      return cmd_solve(g, sol);
    if (*check_cmd)
      return cmd_check(g, chk);
    if (*extract_cmd)
      return cmd_extract(g, ext);
    if (*verify_cmd)
      return cmd_verify(g, ver);
    if (*bench_cmd)
      return cmd_bench(g, bench);
    if (*analyze_cmd)
      return cmd_rect(g, rect);
  } catch (const CLI::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return Usage;
  } catch (const BudgetExceeded &e) {
    std::cerr << "error: " << e.what() << '\n';
    return Budget;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return Usage;
  }
  return Usage;
}
