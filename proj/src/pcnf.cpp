#include "qobdd/pcnf.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "qobdd/text.hpp"

namespace qobdd {

Pcnf::Pcnf(std::size_t num_vars, std::vector<PrefixEntry> prefix, std::vector<Clause> clauses)
    : num_vars_(num_vars), clauses_(std::move(clauses)) {
  position_.assign(num_vars_ + 1, kUnquantified);
  for (const auto &e : prefix) {
    if (e.var == 0 || e.var > num_vars_)
      throw Error("quantified variable " + std::to_string(e.var) + " out of range");
    if (position_[e.var] != kUnquantified)
      throw Error("variable " + std::to_string(e.var) + " quantified twice");
    position_[e.var] = 0;
  }
  std::vector<PrefixEntry> free;
  for (auto &c : clauses_) {
    for (Literal l : c) {
      const Var v = var_of(l);
      if (l == 0 || v > num_vars_)
        throw Error("literal " + std::to_string(l) + " out of range");
      if (position_[v] == kUnquantified) {
        position_[v] = 0;
        free.push_back({Quant::Exists, v});
      }
    }
    std::sort(c.begin(), c.end(), [](Literal a, Literal b) {
      return var_of(a) != var_of(b) ? var_of(a) < var_of(b) : a < b;
    });
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::sort(free.begin(), free.end(), [](auto &a, auto &b) { return a.var < b.var; });
  prefix_ = std::move(free);
  prefix_.insert(prefix_.end(), prefix.begin(), prefix.end());
  for (std::size_t i = 0; i < prefix_.size(); ++i)
    position_[prefix_[i].var] = i;
}

std::size_t Pcnf::position(Var v) const {
  if (!is_quantified(v))
    throw Error("variable " + std::to_string(v) + " is not quantified");
  return position_[v];
}

std::size_t Pcnf::block_count() const noexcept {
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < prefix_.size(); ++i)
    if (i == 0 || prefix_[i].quant != prefix_[i - 1].quant)
      ++blocks;
  return blocks;
}

std::vector<Var> Pcnf::prefix_vars() const {
  std::vector<Var> out;
  for (const auto &e : prefix_)
    out.push_back(e.var);
  return out;
}

std::vector<Var> Pcnf::existentials() const {
  std::vector<Var> out;
  for (const auto &e : prefix_)
    if (e.quant == Quant::Exists)
      out.push_back(e.var);
  return out;
}

std::vector<Var> Pcnf::universals() const {
  std::vector<Var> out;
  for (const auto &e : prefix_)
    if (e.quant == Quant::Forall)
      out.push_back(e.var);
  return out;
}

Var Pcnf::rightmost(std::span<const Literal> c) const {
  Var best = 0;
  for (Literal l : c)
    if (best == 0 || position(var_of(l)) > position(best))
      best = var_of(l);
  return best;
}

bool Pcnf::satisfies(std::span<const std::uint8_t> values) const {
  for (const auto &c : clauses_) {
    bool sat = false;
    for (Literal l : c)
      if ((values[var_of(l)] != 0) == (l > 0)) {
        sat = true;
        break;
      }
    if (!sat)
      return false;
  }
  return true;
}

std::optional<std::string> Pcnf::audit() const {
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const auto &c = clauses_[i];
    for (std::size_t j = 1; j < c.size(); ++j)
      if (var_of(c[j]) == var_of(c[j - 1]))
        return "clause " + std::to_string(i + 1) + " is tautological";
    for (Literal l : c)
      if (!is_quantified(var_of(l)))
        return "clause " + std::to_string(i + 1) + " has an unquantified variable";
  }
  return std::nullopt;
}

// QDIMACS

Pcnf parse_qdimacs(std::istream &in) {
  LineReader reader(in);
  std::string line;
  bool have_header = false;
  std::size_t num_vars = 0, num_clauses = 0;
  std::vector<PrefixEntry> prefix;
  std::vector<Clause> clauses;
  Clause current;
  bool in_matrix = false;

  while (reader.next(line)) {
    const std::size_t no = reader.line_no();
    auto tok = split_ws(line);
    if (tok[0] == "c")
      continue;
    if (tok[0] == "p") {
      if (have_header)
        throw ParseError(no, "duplicate header");
      if (tok.size() != 4 || tok[1] != "cnf")
        throw ParseError(no, "expected 'p cnf <vars> <clauses>'");
      num_vars = parse_uint(tok[2], no);
      num_clauses = parse_uint(tok[3], no);
      have_header = true;
      continue;
    }
    if (!have_header)
      throw ParseError(no, "missing 'p cnf' header");
    if (tok[0] == "a" || tok[0] == "e") {
      if (in_matrix)
        throw ParseError(no, "quantifier line after clauses");
      if (tok.back() != "0")
        throw ParseError(no, "quantifier line must end with 0");
      const Quant q = tok[0] == "a" ? Quant::Forall : Quant::Exists;
      for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
        const std::int64_t v = parse_int(tok[i], no);
        if (v <= 0 || static_cast<std::size_t>(v) > num_vars)
          throw ParseError(no, "variable " + std::string(tok[i]) + " out of range");
        prefix.push_back({q, static_cast<Var>(v)});
      }
      continue;
    }
    in_matrix = true;
    for (auto t : tok) {
      const std::int64_t l = parse_int(t, no);
      if (l == 0) {
        clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (static_cast<std::size_t>(l < 0 ? -l : l) > num_vars)
        throw ParseError(no, "literal " + std::string(t) + " out of range");
      current.push_back(static_cast<Literal>(l));
    }
  }
  if (!have_header)
    throw ParseError(reader.line_no(), "missing 'p cnf' header");
  if (!current.empty())
    throw ParseError(reader.line_no(), "last clause is not terminated by 0");
  if (clauses.size() != num_clauses)
    throw ParseError(reader.line_no(), "header declares " + std::to_string(num_clauses) +
                                           " clauses, found " + std::to_string(clauses.size()));
  try {
    return Pcnf(num_vars, std::move(prefix), std::move(clauses));
  } catch (const ParseError &) {
    throw;
  } catch (const Error &e) {
    throw ParseError(reader.line_no(), e.what());
  }
}

Pcnf parse_qdimacs(const std::string &text) {
  std::istringstream in(text);
  return parse_qdimacs(in);
}

void write_qdimacs(std::ostream &out, const Pcnf &f) {
  out << "p cnf " << f.num_vars() << ' ' << f.clauses().size() << '\n';
  const auto prefix = f.prefix();
  for (std::size_t i = 0; i < prefix.size();) {
    out << (prefix[i].quant == Quant::Forall ? 'a' : 'e');
    std::size_t j = i;
    for (; j < prefix.size() && prefix[j].quant == prefix[i].quant; ++j)
      out << ' ' << prefix[j].var;
    out << " 0\n";
    i = j;
  }
  for (const auto &c : f.clauses()) {
    for (Literal l : c)
      out << l << ' ';
    out << "0\n";
  }
}

std::string to_qdimacs(const Pcnf &f) {
  std::ostringstream out;
  write_qdimacs(out, f);
  return out.str();
}

} // namespace qobdd
