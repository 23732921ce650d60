#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qobdd/pcnf.hpp"

using namespace qobdd;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

const fs::path &workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qobdd_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string &name) { return (workdir() / name).string(); }

Run run(const std::string &args) {
  const std::string cmd = std::string(QOBDD_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE *p = ::popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0)
    r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string &file) {
  std::ifstream in(file);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string &file, const std::string &text) { std::ofstream(file) << text; }

} // namespace

TEST_CASE("gen") {
  Run r = run("gen quparity 4");
  CHECK(r.code == 0);
  CHECK(parse_qdimacs(r.out).clauses().size() == 26);
  r = run("gen eqprime 2");
  CHECK(r.code == 0);
  CHECK(parse_qdimacs(r.out).clauses().size() == 6);
  CHECK(run("gen quparity 1").code == 1);
  CHECK(run("gen eqprime").code == 1);
  CHECK(run("gen nothing 3").code == 1);
  CHECK(run("").code == 1);

  r = run("gen ipg 2");
  CHECK(r.code == 0);
  CHECK(parse_qdimacs(r.out).num_vars() == 4 + 1 + 2);
  CHECK(run("--seed 5 gen ipg 10 --degree 3").out == run("gen ipg 10 --degree 3 --seed 5").out);

  r = run("--json gen eqprime 3");
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["clauses"] == 9);
  CHECK(parse_qdimacs(j["qdimacs"].get<std::string>()).num_vars() == 11);
}

TEST_CASE("solve, check, extract and verify") {
  const std::string f = path("e4.qdimacs"), t = path("e4.trace"), s = path("e4.strategy");
  REQUIRE(run("gen eqprime 4 -o " + f).code == 0);
  Run r = run("solve " + f + " --proof " + t + " --stats " + path("e4.json") + " --expect false");
  CHECK(r.code == 0);
  CHECK(r.out == "FALSE\n");
  const auto stats = nlohmann::json::parse(slurp(path("e4.json")));
  CHECK(stats["max_width"] == 4);
  CHECK(stats["value"] == false);
  CHECK(run("check " + f + " " + t + " --refutation").out == "ACCEPTED refutation\n");
  CHECK(run("extract " + f + " " + t + " -o " + s).code == 0);
  r = run("verify " + f + " " + s + " --range");
  CHECK(r.code == 0);
  CHECK(r.out == "WINNING\nrange 16\n");

  r = run("--json verify " + f + " " + s);
  CHECK(nlohmann::json::parse(r.out)["winning"] == true);

  // Prefix order and an explicit order give the same value.
  CHECK(run("solve " + f + " --order prefix --expect false").code == 0);
  spit(path("order.txt"), "1 5 9 13 2 6 10 14 3 7 11 15 4 8 12\n");
  CHECK(run("solve " + f + " --order given:" + path("order.txt") + " --expect false").code == 0);
  spit(path("bad_order.txt"), "1 2 3\n");
  CHECK(run("solve " + f + " --order given:" + path("bad_order.txt")).code == 1);
  CHECK(run("solve " + f + " --order sideways").code == 1);
}

TEST_CASE("tampered traces and failing strategies") {
  const std::string f = path("e3.qdimacs"), t = path("e3.trace");
  REQUIRE(run("gen eqprime 3 -o " + f).code == 0);
  REQUIRE(run("solve " + f + " --proof " + t).code == 0);
  const std::string good = slurp(t);

  std::string bad = good;
  bad[bad.find("\nh ") + 3] = bad[bad.find("\nh ") + 3] == '0' ? '1' : '0';
  spit(path("hash.trace"), bad);
  Run r = run("check " + f + " " + path("hash.trace"));
  CHECK(r.code == 2);
  CHECK(r.out.find("hash-mismatch") != std::string::npos);

  spit(path("cut.trace"), good.substr(0, good.find('\n', good.size() / 2) + 1));
  r = run("check " + f + " " + path("cut.trace"));
  CHECK(r.code == 2);
  CHECK(r.out.find("truncated") != std::string::npos);
  CHECK(run("extract " + f + " " + path("hash.trace")).code == 2);

  CHECK(run("--budget 10 check " + f + " " + t).code == 4);

  spit(path("u.qdimacs"), "p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n");
  spit(path("u.strategy"), "p qobdd-strategy\no 1 2\nu 1 1\nentry 1\nobdd 1\n0 T1 - -\n");
  r = run("verify " + path("u.qdimacs") + " " + path("u.strategy"));
  CHECK(r.code == 2);
  CHECK(r.out.rfind("COUNTEREXAMPLE ", 0) == 0);
}

TEST_CASE("expectations and budgets") {
  spit(path("true.qdimacs"), "p cnf 1 1\ne 1 0\n1 0\n");
  CHECK(run("solve " + path("true.qdimacs") + " --expect false").code == 3);
  CHECK(run("solve " + path("true.qdimacs") + " --expect true").code == 0);
  REQUIRE(run("gen eqprime 6 -o " + path("e6.qdimacs")).code == 0);
  CHECK(run("--budget 20 solve " + path("e6.qdimacs")).code == 4);
  CHECK(run("solve " + path("missing.qdimacs")).code == 1);
}

TEST_CASE("bench") {
  const Run a = run("bench eqprime --from 2 --to 10 --orders hint,prefix --threads 4");
  const Run b = run("bench eqprime --from 2 --to 10 --orders hint,prefix");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream lines(a.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "family    n     order      value  max_width  trace_nodes  trace_size");

  const auto rows = nlohmann::json::parse(run("--json bench eqprime --from 6 --to 24 --step 6").out);
  REQUIRE(rows.size() == 4);
  for (const auto &row : rows)
    CHECK(row["max_width"] == rows[0]["max_width"]);

  const auto qp = nlohmann::json::parse(run("--json bench quparity --from 2 --to 16").out);
  for (std::size_t i = 1; i < qp.size(); ++i)
    CHECK(qp[i]["trace_nodes"] > qp[i - 1]["trace_nodes"]);
  CHECK(run("bench eqprime --from 5 --to 2").code == 1);
}

TEST_CASE("rect analyze") {
  spit(path("m3.el"), "1 2\n3 4\n5 6\n");
  Run r = run("--json rect analyze --graph " + path("m3.el") + " --partition pairs --report " + path("m3.json"));
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["n"] == 6);
  CHECK(j["m"] == 3);
  CHECK(j["bound"] == 8);
  CHECK(j["oracle_max"] == 8);
  CHECK(j["witness"]["rows"].size() * j["witness"]["cols"].size() == 8);
  CHECK(nlohmann::json::parse(slurp(path("m3.json"))) == j);

  spit(path("c5.el"), "1 2\n2 3\n3 4\n4 5\n5 1\n");
  const Run x = run("--json rect analyze --graph " + path("c5.el") + " --partition random:7");
  const Run y = run("--json rect analyze --graph " + path("c5.el") + " --partition random:7");
  CHECK(x.code == 0);
  CHECK(x.out == y.out);
  spit(path("c5.part"), "1 3\n2 4 5\n");
  r = run("rect analyze --graph " + path("c5.el") + " --partition " + path("c5.part"));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("n 5\n", 0) == 0);
  spit(path("bad.part"), "1 3\n2 4\n");
  CHECK(run("rect analyze --graph " + path("c5.el") + " --partition " + path("bad.part")).code == 1);
}
