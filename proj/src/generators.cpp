#include "qobdd/generators.hpp"

#include <string>

namespace qobdd {

namespace {

void require_n(std::size_t n, const char *family) {
  if (n < 2)
    throw Error(std::string(family) + " needs n >= 2, got " + std::to_string(n));
}

Literal lit(Var v, bool positive = true) {
  return positive ? static_cast<Literal>(v) : -static_cast<Literal>(v);
}

/// xor_u(o1, o2, o, l1, l2): when l1 and l2 are false, o = o1 xor o2.
void add_xor_u(std::vector<Clause> &out, Literal o1, Literal o2, Literal o, Literal l1,
               Literal l2) {
  out.push_back({l1, l2, -o1, o2, o});
  out.push_back({l1, l2, o1, -o2, o});
  out.push_back({l1, l2, -o1, -o2, -o});
  out.push_back({l1, l2, o1, o2, -o});
}

} // namespace

Pcnf gen_quparity(std::size_t n) {
  require_n(n, "QUParity");
  const auto x = [](std::size_t i) { return static_cast<Var>(i); };
  const Var z1 = static_cast<Var>(n + 1), z2 = static_cast<Var>(n + 2);
  const auto t = [n](std::size_t i) { return static_cast<Var>(n + 1 + i); };

  std::vector<PrefixEntry> prefix;
  for (std::size_t i = 1; i <= n; ++i)
    prefix.push_back({Quant::Exists, x(i)});
  prefix.push_back({Quant::Forall, z1});
  prefix.push_back({Quant::Forall, z2});
  for (std::size_t i = 2; i <= n; ++i)
    prefix.push_back({Quant::Exists, t(i)});

  std::vector<Clause> clauses;
  add_xor_u(clauses, lit(x(1)), lit(x(2)), lit(t(2)), lit(z1), lit(z2));
  add_xor_u(clauses, lit(x(1)), lit(x(2)), lit(t(2)), lit(z1, false), lit(z2, false));
  for (std::size_t i = 3; i <= n; ++i) {
    add_xor_u(clauses, lit(t(i - 1)), lit(x(i)), lit(t(i)), lit(z1), lit(z2));
    add_xor_u(clauses, lit(t(i - 1)), lit(x(i)), lit(t(i)), lit(z1, false), lit(z2, false));
  }
  clauses.push_back({lit(z1), lit(z2), lit(t(n))});
  clauses.push_back({lit(z1, false), lit(z2, false), lit(t(n), false)});
  return Pcnf(2 * n + 1, std::move(prefix), std::move(clauses));
}

PathDecomposition quparity_decomposition(std::size_t n) {
  require_n(n, "QUParity");
  const Var z1 = static_cast<Var>(n + 1), z2 = static_cast<Var>(n + 2);
  const auto t = [n](std::size_t i) { return static_cast<Var>(n + 1 + i); };
  PathDecomposition pd;
  pd.bags.push_back({1, 2, t(2), z1, z2});
  for (std::size_t i = 2; i < n; ++i)
    pd.bags.push_back({t(i), static_cast<Var>(i + 1), t(i + 1), z1, z2});
  pd.bags.push_back({z1, z2, t(n)});
  return pd;
}

Pcnf gen_eqprime(std::size_t n) {
  require_n(n, "EQ'");
  const auto x = [](std::size_t i) { return static_cast<Var>(i); };
  const auto u = [n](std::size_t i) { return static_cast<Var>(n + i); };
  const auto t = [n](std::size_t i) { return static_cast<Var>(2 * n + i); };
  const auto e = [n](std::size_t i) { return static_cast<Var>(3 * n + i); };

  std::vector<PrefixEntry> prefix;
  for (std::size_t i = 1; i <= n; ++i)
    prefix.push_back({Quant::Exists, x(i)});
  for (std::size_t i = 1; i <= n; ++i)
    prefix.push_back({Quant::Forall, u(i)});
  for (std::size_t i = 1; i <= n; ++i)
    prefix.push_back({Quant::Exists, t(i)});
  for (std::size_t i = 1; i < n; ++i)
    prefix.push_back({Quant::Exists, e(i)});

  std::vector<Clause> clauses;
  for (std::size_t i = 1; i <= n; ++i) {
    clauses.push_back({lit(x(i)), lit(u(i)), lit(t(i), false)});
    clauses.push_back({lit(x(i), false), lit(u(i), false), lit(t(i), false)});
  }
  clauses.push_back({lit(t(1)), lit(e(1))});
  for (std::size_t i = 2; i < n; ++i)
    clauses.push_back({lit(e(i - 1), false), lit(t(i)), lit(e(i))});
  clauses.push_back({lit(e(n - 1), false), lit(t(n))});
  return Pcnf(4 * n - 1, std::move(prefix), std::move(clauses));
}

PathDecomposition eqprime_decomposition(std::size_t n) {
  require_n(n, "EQ'");
  const auto u = [n](std::size_t i) { return static_cast<Var>(n + i); };
  const auto t = [n](std::size_t i) { return static_cast<Var>(2 * n + i); };
  const auto e = [n](std::size_t i) { return static_cast<Var>(3 * n + i); };
  PathDecomposition pd;
  pd.bags.push_back({1, u(1), t(1), e(1)});
  for (std::size_t i = 2; i < n; ++i)
    pd.bags.push_back({e(i - 1), static_cast<Var>(i), u(i), t(i), e(i)});
  pd.bags.push_back({e(n - 1), static_cast<Var>(n), u(n), t(n)});
  return pd;
}

Pcnf gen_ipg_qbf(const Graph &g, IpgLayout *layout) {
  const std::size_t n = g.vertex_count();
  const auto edges = g.edges();
  const std::size_t m = edges.size();
  const Var z = static_cast<Var>(n + 1);
  Var next = z + 1;

  std::vector<Clause> clauses;
  auto and_gate = [&](Var c, Var a, Var b) {
    clauses.push_back({lit(c, false), lit(a)});
    clauses.push_back({lit(c, false), lit(b)});
    clauses.push_back({lit(c), lit(a, false), lit(b, false)});
  };
  auto xor_gate = [&](Var c, Var a, Var b) {
    clauses.push_back({lit(c, false), lit(a), lit(b)});
    clauses.push_back({lit(c, false), lit(a, false), lit(b, false)});
    clauses.push_back({lit(c), lit(a, false), lit(b)});
    clauses.push_back({lit(c), lit(a), lit(b, false)});
  };

  if (m == 0) {
    clauses.push_back({lit(z, false)});
  } else if (m == 1) {
    and_gate(z, edges[0].first, edges[0].second);
  } else {
    std::vector<Var> ands(m);
    for (std::size_t k = 0; k < m; ++k) {
      ands[k] = next++;
      and_gate(ands[k], edges[k].first, edges[k].second);
    }
    Var acc = ands[0];
    for (std::size_t k = 1; k < m; ++k) {
      const Var out = k + 1 == m ? z : next++;
      xor_gate(out, acc, ands[k]);
      acc = out;
    }
  }

  std::vector<PrefixEntry> prefix;
  for (Var v = 1; v <= n; ++v)
    prefix.push_back({Quant::Exists, v});
  prefix.push_back({Quant::Forall, z});
  for (Var v = z + 1; v < next; ++v)
    prefix.push_back({Quant::Exists, v});
  if (layout)
    *layout = {n, z, static_cast<std::size_t>(next - z - 1)};
  return Pcnf(next - 1, std::move(prefix), std::move(clauses));
}

} // namespace qobdd
