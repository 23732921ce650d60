// Brute-force QBF oracles. Evaluates the game tree over the prefix directly
// from the clause list; no OBDDs involved.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qobdd/pcnf.hpp"

namespace qobdd::testing {

/// Value of the game over f's prefix whose leaves are judged by `leaf`
/// (called with the full assignment, indexed by variable).
template <class Leaf>
bool game_value(const Pcnf &f, Leaf &&leaf) {
  const auto prefix = f.prefix();
  std::vector<std::uint8_t> values(f.num_vars() + 1, 0);
  auto rec = [&](auto &self, std::size_t i) -> bool {
    if (i == prefix.size())
      return leaf(static_cast<const std::vector<std::uint8_t> &>(values));
    const Var v = prefix[i].var;
    values[v] = 0;
    const bool a = self(self, i + 1);
    if (prefix[i].quant == Quant::Exists ? a : !a)
      return a;
    values[v] = 1;
    return self(self, i + 1);
  };
  return rec(rec, 0);
}

/// Truth value of the closed formula `f` by exhaustive game-tree search.
inline bool brute_force_value(const Pcnf &f) {
  return game_value(f, [&](const std::vector<std::uint8_t> &v) { return f.satisfies(v); });
}

/// Value of `f` when the universal player follows `move` for every universal
/// variable: `move(u, values)` sees the assignment so far. Existential moves
/// are searched exhaustively.
template <class Move>
bool value_against(const Pcnf &f, Move &&move) {
  const auto prefix = f.prefix();
  std::vector<std::uint8_t> values(f.num_vars() + 1, 0);
  auto rec = [&](auto &self, std::size_t i) -> bool {
    if (i == prefix.size())
      return f.satisfies(values);
    const Var v = prefix[i].var;
    if (prefix[i].quant == Quant::Forall) {
      values[v] = move(v, values) ? 1 : 0;
      return self(self, i + 1);
    }
    for (std::uint8_t b : {0, 1}) {
      values[v] = b;
      if (self(self, i + 1))
        return true;
    }
    return false;
  };
  return rec(rec, 0);
}

struct RandomPcnfParams {
  std::size_t max_vars = 14;
  std::size_t max_clauses = 30;
  std::size_t min_blocks = 2;
  std::size_t max_blocks = 4;
  std::size_t max_width = 4;
};

/// Random closed PCNF with non-tautological clauses; the prefix is a random
/// permutation of the variables cut into alternating blocks.
inline Pcnf random_pcnf(std::mt19937_64 &rng, const RandomPcnfParams &p = {}) {
  std::uniform_int_distribution<std::size_t> nv(std::max<std::size_t>(p.max_blocks, 3), p.max_vars);
  const std::size_t n = nv(rng);
  std::vector<Var> vars(n);
  for (std::size_t i = 0; i < n; ++i)
    vars[i] = static_cast<Var>(i + 1);
  std::shuffle(vars.begin(), vars.end(), rng);

  std::uniform_int_distribution<std::size_t> nb(p.min_blocks, p.max_blocks);
  const std::size_t blocks = nb(rng);
  std::vector<std::size_t> cuts{0, n};
  std::vector<std::size_t> inner(n - 1);
  for (std::size_t i = 0; i < n - 1; ++i)
    inner[i] = i + 1;
  std::shuffle(inner.begin(), inner.end(), rng);
  cuts.insert(cuts.end(), inner.begin(), inner.begin() + (blocks - 1));
  std::sort(cuts.begin(), cuts.end());
  Quant q = std::bernoulli_distribution(0.5)(rng) ? Quant::Exists : Quant::Forall;
  std::vector<PrefixEntry> prefix;
  for (std::size_t b = 0; b + 1 < cuts.size(); ++b) {
    for (std::size_t i = cuts[b]; i < cuts[b + 1]; ++i)
      prefix.push_back({q, vars[i]});
    q = q == Quant::Exists ? Quant::Forall : Quant::Exists;
  }

  std::uniform_int_distribution<std::size_t> nc(1, p.max_clauses);
  std::uniform_int_distribution<std::size_t> width(1, p.max_width);
  std::uniform_int_distribution<Var> pick(1, static_cast<Var>(n));
  std::bernoulli_distribution sign(0.5);
  std::vector<Clause> clauses(nc(rng));
  for (auto &c : clauses) {
    const std::size_t w = width(rng);
    std::vector<Var> used;
    while (used.size() < w) {
      const Var v = pick(rng);
      if (std::find(used.begin(), used.end(), v) == used.end())
        used.push_back(v);
    }
    for (Var v : used)
      c.push_back(sign(rng) ? static_cast<Literal>(v) : -static_cast<Literal>(v));
  }
  return Pcnf(n, std::move(prefix), std::move(clauses));
}

} // namespace qobdd::testing
