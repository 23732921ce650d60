#include "qobdd/proof.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "qobdd/text.hpp"

namespace qobdd {

std::string formula_hash(const Pcnf &f) {
  const std::string text = to_qdimacs(f);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i)
    out << std::setw(2) << static_cast<unsigned>(digest[i]);
  return out.str();
}

// Trace text format

namespace {

std::size_t parse_ref(std::string_view tok, std::size_t line) {
  return static_cast<std::size_t>(parse_uint(tok, line));
}

Var parse_var(std::string_view tok, std::size_t line) {
  const std::uint64_t v = parse_uint(tok, line);
  if (v == 0 || v > UINT32_MAX)
    throw ParseError(line, "bad variable '" + std::string(tok) + "'");
  return static_cast<Var>(v);
}

void expect_arity(const std::vector<std::string_view> &tok, std::size_t n, std::size_t line) {
  if (tok.size() != n)
    throw ParseError(line, "expected " + std::to_string(n) + " fields, got " +
                               std::to_string(tok.size()));
}

} // namespace

ProofTrace parse_trace(std::istream &in) {
  LineReader reader(in);
  std::string line;
  ProofTrace t;

  if (!reader.next(line))
    throw TruncatedInput(reader.line_no(), "empty trace");
  auto tok = split_ws(line);
  if (tok.size() != 4 || tok[0] != "p" || tok[1] != "qobdd-trace")
    throw ParseError(reader.line_no(), "expected 'p qobdd-trace <nvars> <nlines>'");
  t.num_vars = parse_uint(tok[2], reader.line_no());
  const std::size_t nlines = parse_uint(tok[3], reader.line_no());

  if (!reader.next(line))
    throw TruncatedInput(reader.line_no(), "missing hash line");
  tok = split_ws(line);
  if (tok.size() != 2 || tok[0] != "h")
    throw ParseError(reader.line_no(), "expected 'h <sha256>'");
  t.formula_hash = std::string(tok[1]);

  if (!reader.next(line))
    throw TruncatedInput(reader.line_no(), "missing order line");
  tok = split_ws(line);
  if (tok[0] != "o")
    throw ParseError(reader.line_no(), "expected 'o <v1> ... <vn>'");
  for (std::size_t i = 1; i < tok.size(); ++i)
    t.order.push_back(parse_var(tok[i], reader.line_no()));

  for (std::size_t id = 1; id <= nlines; ++id) {
    if (!reader.next(line))
      throw TruncatedInput(reader.line_no(), "trace ends after " + std::to_string(id - 1) +
                                                 " of " + std::to_string(nlines) + " lines");
    const std::size_t no = reader.line_no();
    tok = split_ws(line);
    if (tok.size() < 2)
      throw ParseError(no, "expected '<id> <rule> ...'");
    if (parse_ref(tok[0], no) != id)
      throw ParseError(no, "expected line id " + std::to_string(id));
    ProofLine l;
    if (tok[1] == "A") {
      expect_arity(tok, 3, no);
      l = ProofLine::axiom(parse_ref(tok[2], no));
    } else if (tok[1] == "C") {
      expect_arity(tok, 4, no);
      l = ProofLine::conj(parse_ref(tok[2], no), parse_ref(tok[3], no));
    } else if (tok[1] == "P") {
      expect_arity(tok, 4, no);
      l = ProofLine::proj(parse_var(tok[2], no), parse_ref(tok[3], no));
    } else if (tok[1] == "U") {
      expect_arity(tok, 5, no);
      if (tok[3] != "0" && tok[3] != "1")
        throw ParseError(no, "URed constant must be 0 or 1");
      l = ProofLine::ured(parse_var(tok[2], no), tok[3] == "1", parse_ref(tok[4], no));
    } else if (tok[1] == "E") {
      if (tok.size() < 3 || tok.back() != "0")
        throw ParseError(no, "Entail line must end with 0");
      std::vector<std::size_t> premises;
      for (std::size_t i = 2; i + 1 < tok.size(); ++i)
        premises.push_back(parse_ref(tok[i], no));
      if (!reader.next(line))
        throw TruncatedInput(reader.line_no(), "missing OBDD block");
      auto head = split_ws(line);
      if (head.size() != 2 || head[0] != "obdd")
        throw ParseError(reader.line_no(), "expected 'obdd <k>'");
      const std::size_t k = parse_uint(head[1], reader.line_no());
      std::string block = line + '\n';
      for (std::size_t i = 0; i < k; ++i) {
        if (!reader.next(line))
          throw TruncatedInput(reader.line_no(), "OBDD block truncated");
        block += line + '\n';
      }
      l = ProofLine::entail(std::move(premises), std::move(block));
    } else {
      throw ParseError(no, "unknown rule '" + std::string(tok[1]) + "'");
    }
    t.lines.push_back(std::move(l));
  }
  if (reader.next(line))
    throw ParseError(reader.line_no(), "content after the declared " + std::to_string(nlines) +
                                           " lines");
  return t;
}

ProofTrace parse_trace(const std::string &text) {
  std::istringstream in(text);
  return parse_trace(in);
}

void write_trace(std::ostream &out, const ProofTrace &t) {
  out << "p qobdd-trace " << t.num_vars << ' ' << t.lines.size() << '\n';
  out << "h " << t.formula_hash << '\n';
  out << 'o';
  for (Var v : t.order)
    out << ' ' << v;
  out << '\n';
  for (std::size_t i = 0; i < t.lines.size(); ++i) {
    const ProofLine &l = t.lines[i];
    out << i + 1 << ' ';
    switch (l.rule) {
    case Rule::Axiom:
      out << "A " << l.clause << '\n';
      break;
    case Rule::Conj:
      out << "C " << l.premises.at(0) << ' ' << l.premises.at(1) << '\n';
      break;
    case Rule::Proj:
      out << "P " << l.var << ' ' << l.premises.at(0) << '\n';
      break;
    case Rule::URed:
      out << "U " << l.var << ' ' << (l.value ? 1 : 0) << ' ' << l.premises.at(0) << '\n';
      break;
    case Rule::Entail:
      out << 'E';
      for (std::size_t j : l.premises)
        out << ' ' << j;
      out << " 0\n" << l.block;
      break;
    }
  }
}

std::string trace_to_string(const ProofTrace &t) {
  std::ostringstream out;
  write_trace(out, t);
  return out.str();
}

// Checker

const char *reason_code(Reason r) noexcept {
  switch (r) {
  case Reason::None: return "none";
  case Reason::OrderMismatch: return "order-mismatch";
  case Reason::AxiomMismatch: return "axiom-mismatch";
  case Reason::BadReference: return "bad-reference";
  case Reason::UredNotRightmost: return "ured-not-rightmost";
  case Reason::UredNotUniversal: return "ured-not-universal";
  case Reason::EntailmentFailed: return "entailment-failed";
  case Reason::HashMismatch: return "hash-mismatch";
  case Reason::BudgetExceeded: return "budget-exceeded";
  case Reason::Malformed: return "malformed";
  case Reason::Truncated: return "truncated";
  }
  return "unknown";
}

std::size_t Replay::total_size() const {
  std::size_t total = 0;
  for (NodeRef r : lines)
    total += manager->size(r);
  return total;
}

namespace {

Verdict reject(std::size_t line, Reason reason, std::string detail) {
  return {false, line, reason, std::move(detail)};
}

std::optional<Verdict> check_order(const Pcnf &f, const ProofTrace &t) {
  auto expected = f.prefix_vars();
  auto given = t.order;
  std::sort(expected.begin(), expected.end());
  std::sort(given.begin(), given.end());
  if (given != expected)
    return reject(0, Reason::OrderMismatch, "order is not a permutation of the prefix variables");
  return std::nullopt;
}

} // namespace

Replay replay_trace(const Pcnf &f, const ProofTrace &t, const CheckOptions &opts) {
  Replay r;
  if (t.formula_hash != formula_hash(f)) {
    r.verdict = reject(0, Reason::HashMismatch, "trace is bound to a different formula");
    return r;
  }
  if (t.num_vars != f.num_vars()) {
    r.verdict = reject(0, Reason::Malformed, "variable count differs from the formula");
    return r;
  }
  if (auto bad = check_order(f, t)) {
    r.verdict = *bad;
    return r;
  }
  r.manager = std::make_shared<Manager>(VarOrder(t.order), opts.node_budget);
  Manager &mgr = *r.manager;
  const auto clauses = f.clauses();

  for (std::size_t i = 0; i < t.lines.size(); ++i) {
    const std::size_t id = i + 1;
    const ProofLine &l = t.lines[i];
    for (std::size_t j : l.premises)
      if (j == 0 || j >= id) {
        r.verdict = reject(id, Reason::BadReference, "premise " + std::to_string(j) +
                                                         " does not precede line " +
                                                         std::to_string(id));
        return r;
      }
    if (id <= clauses.size() && (l.rule != Rule::Axiom || l.clause != id)) {
      r.verdict = reject(id, Reason::AxiomMismatch,
                         "line " + std::to_string(id) + " must be axiom " + std::to_string(id));
      return r;
    }
    try {
      NodeRef result;
      switch (l.rule) {
      case Rule::Axiom:
        if (l.clause == 0 || l.clause > clauses.size()) {
          r.verdict = reject(id, Reason::AxiomMismatch,
                             "no clause " + std::to_string(l.clause) + " in the formula");
          return r;
        }
        result = mgr.clause(clauses[l.clause - 1]);
        break;
      case Rule::Conj:
        result = mgr.conj(r.lines[l.premises[0] - 1], r.lines[l.premises[1] - 1]);
        break;
      case Rule::Proj:
        if (!f.is_quantified(l.var)) {
          r.verdict = reject(id, Reason::Malformed,
                             "projection of unknown variable " + std::to_string(l.var));
          return r;
        }
        result = mgr.exists(r.lines[l.premises[0] - 1], l.var);
        break;
      case Rule::URed: {
        if (!f.is_quantified(l.var) || !f.is_universal(l.var)) {
          r.verdict = reject(id, Reason::UredNotUniversal,
                             "variable " + std::to_string(l.var) + " is not universal");
          return r;
        }
        const NodeRef src = r.lines[l.premises[0] - 1];
        const std::size_t pos = f.position(l.var);
        for (Var v : mgr.support(src))
          if (f.position(v) > pos) {
            r.verdict = reject(id, Reason::UredNotRightmost,
                               "variable " + std::to_string(v) + " is right of " +
                                   std::to_string(l.var));
            return r;
          }
        result = mgr.restrict(src, l.var, l.value);
        break;
      }
      case Rule::Entail: {
        NodeRef claimed;
        try {
          claimed = block_from_string(l.block, mgr);
        } catch (const BudgetExceeded &) {
          throw;
        } catch (const Error &e) {
          r.verdict = reject(id, Reason::Malformed, std::string("bad OBDD block: ") + e.what());
          return r;
        }
        NodeRef premise = mgr.one();
        for (std::size_t j : l.premises)
          premise = mgr.conj(premise, r.lines[j - 1]);
        if (!mgr.is_one(mgr.apply(Op::Implies, premise, claimed))) {
          r.verdict = reject(id, Reason::EntailmentFailed, "premises do not entail the claim");
          return r;
        }
        result = claimed;
        break;
      }
      }
      r.lines.push_back(result);
    } catch (const qobdd::BudgetExceeded &e) {
      r.verdict = reject(id, Reason::BudgetExceeded, e.what());
      return r;
    }
  }
  if (t.lines.size() < clauses.size()) {
    r.verdict = reject(t.lines.size() + 1, Reason::AxiomMismatch, "missing axiom lines");
    return r;
  }
  r.verdict.accepted = true;
  return r;
}

Verdict check_trace(const Pcnf &f, const ProofTrace &t, const CheckOptions &opts) {
  return replay_trace(f, t, opts).verdict;
}

Verdict check_trace_text(const Pcnf &f, const std::string &text, const CheckOptions &opts) {
  ProofTrace t;
  try {
    t = parse_trace(text);
  } catch (const TruncatedInput &e) {
    return reject(0, Reason::Truncated, e.what());
  } catch (const ParseError &e) {
    return reject(0, Reason::Malformed, e.what());
  }
  return check_trace(f, t, opts);
}

bool is_refutation(const Pcnf &f, const ProofTrace &t, const CheckOptions &opts) {
  return replay_trace(f, t, opts).refutation();
}

// QU-Resolution

QuResProof parse_qures(std::istream &in) {
  LineReader reader(in);
  std::string line;
  QuResProof p;
  while (reader.next(line)) {
    const std::size_t no = reader.line_no();
    auto tok = split_ws(line);
    if (tok[0] == "c")
      continue;
    if (tok.size() < 2)
      throw ParseError(no, "expected '<id> <rule> ...'");
    if (parse_ref(tok[0], no) != p.lines.size() + 1)
      throw ParseError(no, "expected line id " + std::to_string(p.lines.size() + 1));
    QuResLine l;
    if (tok[1] == "A") {
      if (tok.back() != "0")
        throw ParseError(no, "axiom must end with 0");
      l.rule = QuRule::Axiom;
      for (std::size_t i = 2; i + 1 < tok.size(); ++i) {
        const std::int64_t lit = parse_int(tok[i], no);
        if (lit == 0 || lit > INT32_MAX || lit < -INT32_MAX)
          throw ParseError(no, "bad literal '" + std::string(tok[i]) + "'");
        l.clause.push_back(static_cast<Literal>(lit));
      }
    } else if (tok[1] == "R") {
      expect_arity(tok, 5, no);
      l.rule = QuRule::Resolve;
      l.j = parse_ref(tok[2], no);
      l.k = parse_ref(tok[3], no);
      l.lit = static_cast<Literal>(parse_var(tok[4], no));
    } else if (tok[1] == "U") {
      expect_arity(tok, 4, no);
      l.rule = QuRule::Reduce;
      l.j = parse_ref(tok[2], no);
      const std::int64_t lit = parse_int(tok[3], no);
      if (lit == 0 || lit > INT32_MAX || lit < -INT32_MAX)
        throw ParseError(no, "bad literal '" + std::string(tok[3]) + "'");
      l.lit = static_cast<Literal>(lit);
    } else {
      throw ParseError(no, "unknown rule '" + std::string(tok[1]) + "'");
    }
    p.lines.push_back(std::move(l));
  }
  return p;
}

QuResProof parse_qures(const std::string &text) {
  std::istringstream in(text);
  return parse_qures(in);
}

void write_qures(std::ostream &out, const QuResProof &p) {
  for (std::size_t i = 0; i < p.lines.size(); ++i) {
    const QuResLine &l = p.lines[i];
    out << i + 1 << ' ';
    switch (l.rule) {
    case QuRule::Axiom:
      out << 'A';
      for (Literal x : l.clause)
        out << ' ' << x;
      out << " 0\n";
      break;
    case QuRule::Resolve:
      out << "R " << l.j << ' ' << l.k << ' ' << l.lit << '\n';
      break;
    case QuRule::Reduce:
      out << "U " << l.j << ' ' << l.lit << '\n';
      break;
    }
  }
}

std::string qures_to_string(const QuResProof &p) {
  std::ostringstream out;
  write_qures(out, p);
  return out.str();
}

namespace {

Clause normalized(Clause c) {
  std::sort(c.begin(), c.end(), [](Literal a, Literal b) {
    return var_of(a) != var_of(b) ? var_of(a) < var_of(b) : a < b;
  });
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

bool contains(const Clause &c, Literal l) { return std::find(c.begin(), c.end(), l) != c.end(); }

bool tautological(const Clause &c) {
  for (std::size_t i = 1; i < c.size(); ++i)
    if (var_of(c[i]) == var_of(c[i - 1]))
      return true;
  return false;
}

[[noreturn]] void invalid(std::size_t id, const std::string &what) {
  throw StructureError("QU-Res line " + std::to_string(id) + ": " + what);
}

} // namespace

std::vector<Clause> qures_clauses(const Pcnf &f, const QuResProof &p) {
  std::vector<Clause> out;
  const auto matrix = f.clauses();
  for (std::size_t i = 0; i < p.lines.size(); ++i) {
    const std::size_t id = i + 1;
    const QuResLine &l = p.lines[i];
    if (l.rule != QuRule::Axiom) {
      if (l.j == 0 || l.j >= id || (l.rule == QuRule::Resolve && (l.k == 0 || l.k >= id)))
        invalid(id, "reference to a later or missing line");
    }
    switch (l.rule) {
    case QuRule::Axiom: {
      Clause c = normalized(l.clause);
      if (std::find(matrix.begin(), matrix.end(), c) == matrix.end())
        invalid(id, "axiom is not a clause of the formula");
      out.push_back(std::move(c));
      break;
    }
    case QuRule::Resolve: {
      const Clause &a = out[l.j - 1], &b = out[l.k - 1];
      const Literal x = l.lit;
      if (!contains(a, x) || !contains(b, -x))
        invalid(id, "pivot " + std::to_string(x) + " must occur positively in " +
                        std::to_string(l.j) + " and negatively in " + std::to_string(l.k));
      Clause r;
      for (Literal y : a)
        if (y != x)
          r.push_back(y);
      for (Literal y : b)
        if (y != -x)
          r.push_back(y);
      r = normalized(std::move(r));
      if (tautological(r))
        invalid(id, "tautological resolvent");
      out.push_back(std::move(r));
      break;
    }
    case QuRule::Reduce: {
      const Clause &a = out[l.j - 1];
      const Var u = var_of(l.lit);
      if (!contains(a, l.lit))
        invalid(id, "literal " + std::to_string(l.lit) + " not in line " + std::to_string(l.j));
      if (!f.is_universal(u))
        invalid(id, "variable " + std::to_string(u) + " is not universal");
      for (Literal y : a)
        if (!f.is_universal(var_of(y)) && f.position(var_of(y)) > f.position(u))
          invalid(id, "existential " + std::to_string(var_of(y)) + " is right of " +
                          std::to_string(u));
      Clause r;
      for (Literal y : a)
        if (y != l.lit)
          r.push_back(y);
      out.push_back(std::move(r));
      break;
    }
    }
  }
  return out;
}

ProofTrace simulate_qures(const Pcnf &f, const QuResProof &p, std::vector<Var> order) {
  const auto claimed = qures_clauses(f, p);
  if (claimed.empty() || !claimed.back().empty())
    throw StructureError("QU-Res proof does not derive the empty clause");
  if (order.empty())
    order = f.prefix_vars();

  ProofTrace t;
  t.num_vars = f.num_vars();
  t.formula_hash = formula_hash(f);
  t.order = order;

  // Each trace line represents a clause; `actual[id-1]` is that clause.
  std::vector<Clause> actual;
  const auto matrix = f.clauses();
  auto emit = [&](ProofLine l, Clause c) {
    t.lines.push_back(std::move(l));
    actual.push_back(std::move(c));
    return t.lines.size();
  };
  for (std::size_t i = 0; i < matrix.size(); ++i)
    emit(ProofLine::axiom(i + 1), matrix[i]);

  std::vector<std::size_t> line_of(p.lines.size());
  for (std::size_t i = 0; i < p.lines.size(); ++i) {
    const QuResLine &l = p.lines[i];
    switch (l.rule) {
    case QuRule::Axiom: {
      const auto it = std::find(matrix.begin(), matrix.end(), claimed[i]);
      line_of[i] = static_cast<std::size_t>(it - matrix.begin()) + 1;
      break;
    }
    case QuRule::Resolve: {
      const std::size_t a = line_of[l.j - 1], b = line_of[l.k - 1];
      const Literal x = l.lit;
      if (!contains(actual[a - 1], x)) {
        line_of[i] = a;
        break;
      }
      if (!contains(actual[b - 1], -x)) {
        line_of[i] = b;
        break;
      }
      Clause r;
      for (Literal y : actual[a - 1])
        if (y != x)
          r.push_back(y);
      for (Literal y : actual[b - 1])
        if (y != -x)
          r.push_back(y);
      r = normalized(std::move(r));
      const std::size_t c = emit(ProofLine::conj(a, b), {});
      line_of[i] = emit(ProofLine::proj(var_of(x), c), std::move(r));
      break;
    }
    case QuRule::Reduce: {
      std::size_t cur = line_of[l.j - 1];
      if (!contains(actual[cur - 1], l.lit)) {
        line_of[i] = cur;
        break;
      }
      const std::size_t pos = f.position(var_of(l.lit));
      // Universals right of u go first, rightmost first.
      Clause rest = actual[cur - 1];
      std::sort(rest.begin(), rest.end(),
                [&](Literal a, Literal b) { return f.position(var_of(a)) > f.position(var_of(b)); });
      for (Literal y : rest) {
        if (f.position(var_of(y)) < pos)
          break;
        Clause r;
        for (Literal z : actual[cur - 1])
          if (z != y)
            r.push_back(z);
        cur = emit(ProofLine::ured(var_of(y), y < 0, cur), std::move(r));
      }
      line_of[i] = cur;
      break;
    }
    }
  }

  const std::size_t last = line_of.back();
  if (last != t.lines.size())
    emit(ProofLine::conj(last, last), {});
  return t;
}

} // namespace qobdd
