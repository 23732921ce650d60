#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "qobdd/obdd.hpp"
#include "qobdd/text.hpp"
#include "support/truth_table.hpp"

using namespace qobdd;
using namespace qobdd::testing;

TEST_CASE("constants and literals") {
  Manager mgr(VarOrder({1, 2}));
  CHECK(mgr.zero() != mgr.one());
  CHECK(mgr.is_zero(mgr.constant(false)));
  CHECK(mgr.is_one(mgr.constant(true)));
  Assignment a{0, 1, 1};
  CHECK_FALSE(mgr.evaluate(mgr.zero(), a));
  CHECK(mgr.evaluate(mgr.one(), a));

  NodeRef x = mgr.make(1, mgr.zero(), mgr.one());
  CHECK(x == mgr.literal(1));
  NodeRef y = mgr.literal(2);
  CHECK(mgr.make(1, y, y) == y);
  CHECK(mgr.make(2, mgr.zero(), mgr.one()) == mgr.make(2, mgr.zero(), mgr.one()));
  CHECK(mgr.size(x) == 3);
}

TEST_CASE("make rejects order violations") {
  Manager mgr(VarOrder({1, 2}));
  NodeRef x = mgr.literal(1);
  CHECK_THROWS_AS(mgr.make(2, x, mgr.one()), OrderError);
  CHECK_THROWS_AS(mgr.make(1, x, mgr.zero()), OrderError);
  CHECK_THROWS_AS(mgr.make(7, mgr.zero(), mgr.one()), OrderError);
  CHECK_THROWS_AS(VarOrder({1, 1}), OrderError);
}

TEST_CASE("cross-manager references are rejected") {
  Manager a(VarOrder({1})), b(VarOrder({1}));
  NodeRef x = a.literal(1);
  CHECK_THROWS_AS(b.conj(x, b.one()), StructureError);
}

TEST_CASE("apply basics") {
  Manager mgr(VarOrder({1, 2}));
  NodeRef x = mgr.literal(1), y = mgr.literal(2);
  NodeRef xy = mgr.conj(x, y);
  CHECK(mgr.size(xy) == 4); // two decision nodes + both sinks
  CHECK(table_of(mgr, xy, {1, 2}).bits == std::vector<std::uint8_t>{0, 0, 0, 1});
  CHECK(mgr.conj(x, mgr.one()) == x);
  CHECK(mgr.evaluate(xy, Assignment{0, 1, 1}));
}

TEST_CASE("apply agrees with truth tables for all 16 operators") {
  std::mt19937_64 rng(11);
  const auto vars = iota_vars(6);
  for (int round = 0; round < 20; ++round) {
    Manager mgr{VarOrder(vars)};
    auto tf = random_table(vars, rng), tg = random_table(vars, rng, 0.3);
    NodeRef f = build(mgr, tf), g = build(mgr, tg);
    for (unsigned op = 0; op < 16; ++op) {
      NodeRef h = mgr.apply(static_cast<Op>(op), f, g);
      auto th = table_of(mgr, h, vars);
      for (std::size_t r = 0; r < th.rows(); ++r)
        REQUIRE(th.bits[r] == eval_op(static_cast<Op>(op), tf.bits[r], tg.bits[r]));
    }
    CHECK_FALSE(mgr.audit().has_value());
  }
}

TEST_CASE("canonicity across construction paths") {
  std::mt19937_64 rng(5);
  const auto vars = iota_vars(6);
  Manager mgr{VarOrder(vars)};
  for (int round = 0; round < 50; ++round) {
    auto ta = random_table(vars, rng), tb = random_table(vars, rng);
    NodeRef a = build(mgr, ta), b = build(mgr, tb);
    // De Morgan: a & b == !( !a | !b )
    NodeRef lhs = mgr.conj(a, b);
    NodeRef rhs = mgr.negate(mgr.disj(mgr.negate(a), mgr.negate(b)));
    CHECK(lhs == rhs);
    // Distributivity of restrict over xor
    NodeRef x1 = mgr.apply(Op::Xor, mgr.restrict(a, 3, true), mgr.restrict(b, 3, true));
    NodeRef x2 = mgr.restrict(mgr.apply(Op::Xor, a, b), 3, true);
    CHECK(x1 == x2);
  }
  CHECK_FALSE(mgr.audit().has_value());
}

TEST_CASE("negate is an involution and preserves size") {
  std::mt19937_64 rng(3);
  const auto vars = iota_vars(8);
  Manager mgr{VarOrder(vars)};
  CHECK(mgr.negate(mgr.zero()) == mgr.one());
  for (int round = 0; round < 30; ++round) {
    NodeRef f = build(mgr, random_table(vars, rng, 0.2));
    NodeRef nf = mgr.negate(f);
    CHECK(mgr.size(nf) == mgr.size(f));
    CHECK(mgr.negate(nf) == f);
    CHECK(mgr.is_zero(mgr.conj(f, nf)));
  }
}

TEST_CASE("restrict") {
  Manager mgr(VarOrder({1, 2}));
  NodeRef x = mgr.literal(1), y = mgr.literal(2);
  CHECK(mgr.is_one(mgr.restrict(x, 1, true)));
  CHECK(mgr.is_zero(mgr.restrict(mgr.conj(x, y), 1, false)));
  CHECK(mgr.restrict(y, 1, true) == y);

  std::mt19937_64 rng(8);
  const auto vars = iota_vars(7);
  Manager big{VarOrder(vars)};
  for (int round = 0; round < 40; ++round) {
    auto t = random_table(vars, rng);
    NodeRef f = build(big, t);
    const Var x_var = static_cast<Var>(1 + round % 7);
    const bool c = round % 2;
    NodeRef r = big.restrict(f, x_var, c);
    auto expected = big.support(f);
    expected.erase(std::remove(expected.begin(), expected.end(), x_var), expected.end());
    auto got = big.support(r);
    // Support may shrink further when the cofactor loses other variables.
    CHECK(std::includes(expected.begin(), expected.end(), got.begin(), got.end()));
    CHECK(std::find(got.begin(), got.end(), x_var) == got.end());
    auto tr = table_of(big, r, vars);
    for (std::size_t row = 0; row < t.rows(); ++row) {
      std::size_t fixed = c ? row | (std::size_t{1} << (x_var - 1))
                            : row & ~(std::size_t{1} << (x_var - 1));
      REQUIRE(tr.bits[row] == t.bits[fixed]);
    }
  }
}

TEST_CASE("exists and forall") {
  Manager mgr(VarOrder({1, 2}));
  NodeRef x = mgr.literal(1), y = mgr.literal(2);
  CHECK(mgr.exists(mgr.conj(x, y), 1) == y);
  CHECK(mgr.forall(mgr.disj(x, y), 1) == y);

  std::mt19937_64 rng(21);
  const auto vars = iota_vars(6);
  Manager big{VarOrder(vars)};
  for (int round = 0; round < 60; ++round) {
    auto t = random_table(vars, rng);
    NodeRef f = build(big, t);
    const Var v = static_cast<Var>(1 + round % 6);
    const std::size_t bit = std::size_t{1} << (v - 1);
    auto te = table_of(big, big.exists(f, v), vars);
    auto ta = table_of(big, big.forall(f, v), vars);
    for (std::size_t row = 0; row < t.rows(); ++row) {
      const bool f0 = t.bits[row & ~bit], f1 = t.bits[row | bit];
      REQUIRE(te.bits[row] == (f0 || f1));
      REQUIRE(ta.bits[row] == (f0 && f1));
    }
  }
}

TEST_CASE("complete OBDDs") {
  {
    Manager mgr(VarOrder({1, 2}));
    CompleteObdd c = mgr.complete(mgr.one());
    CHECK(c.layers.size() == 3);
    CHECK(c.width() == 1);
    CHECK(c.size() == 3);
  }
  {
    Manager mgr(VarOrder({1}));
    CHECK(mgr.complete(mgr.literal(1)).width() == 1);
  }
  std::mt19937_64 rng(13);
  for (std::size_t n : {3u, 6u, 10u}) {
    const auto vars = iota_vars(n);
    Manager mgr{VarOrder(vars)};
    for (int round = 0; round < 10; ++round) {
      auto t = random_table(vars, rng, round % 2 ? 0.5 : 0.1);
      NodeRef f = build(mgr, t);
      CompleteObdd c = mgr.complete(f);
      CHECK(c.size() <= (n + 1) * mgr.size(f));
      CHECK(c.width() == mgr.complete_width(f));
      for (std::size_t row = 0; row < t.rows(); ++row)
        REQUIRE(c.evaluate(t.assignment(row)) == static_cast<bool>(t.bits[row]));
      for (std::size_t level = 0; level < n; ++level)
        REQUIRE(c.layers[level].size() == distinct_subfunctions(t, level));
    }
  }
}

TEST_CASE("width of inner product on two pairs") {
  // IP(x1,y1,x2,y2) under the pair-interleaved order x1 y1 x2 y2.
  Manager mgr(VarOrder({1, 2, 3, 4}));
  NodeRef ip = mgr.apply(Op::Xor, mgr.conj(mgr.literal(1), mgr.literal(2)),
                         mgr.conj(mgr.literal(3), mgr.literal(4)));
  auto t = table_of(mgr, ip, {1, 2, 3, 4});
  CompleteObdd c = mgr.complete(ip);
  std::size_t oracle = 0;
  for (std::size_t level = 0; level < 4; ++level)
    oracle = std::max(oracle, distinct_subfunctions(t, level));
  CHECK(c.width() == oracle);
  CHECK(c.width() == 4); // last layer: {0, y2, 1, !y2}
}

TEST_CASE("ObddBlock round trip") {
  Manager mgr(VarOrder({1, 2, 3}));
  for (NodeRef f : {mgr.zero(), mgr.one(), mgr.literal(2), mgr.literal(3, false)}) {
    const std::string text = block_to_string(mgr, f);
    CHECK(block_from_string(text, mgr) == f);
  }
  CHECK(block_to_string(mgr, mgr.literal(2)) == "obdd 3\n0 T0 - -\n1 T1 - -\n2 2 0 1\n");

  std::mt19937_64 rng(99);
  const auto vars = iota_vars(10);
  Manager src{VarOrder(vars)}, dst{VarOrder(vars)};
  for (int round = 0; round < 200; ++round) {
    auto t = random_table(vars, rng, 0.05 + 0.9 * (round % 10) / 10.0);
    NodeRef f = build(src, t);
    NodeRef g = block_from_string(block_to_string(src, f), dst);
    REQUIRE(table_of(dst, g, vars).bits == t.bits);
    REQUIRE(dst.size(g) == src.size(f));
  }
}

TEST_CASE("ObddBlock errors") {
  Manager mgr(VarOrder({1, 2}));
  CHECK_THROWS_AS(block_from_string("obdd 2\n0 T0 - -\n", mgr), ParseError);
  CHECK_THROWS_AS(block_from_string("obdd 1\n0 T2 - -\n", mgr), ParseError);
  CHECK_THROWS_AS(block_from_string("obdd 3\n0 T0 - -\n1 T1 - -\n2 9 0 1\n", mgr), OrderError);
  // Node on variable 2 above a node on variable 1 violates the order 1 < 2.
  CHECK_THROWS_AS(
      block_from_string("obdd 4\n0 T0 - -\n1 T1 - -\n2 1 0 1\n3 2 0 2\n", mgr), OrderError);
  CHECK_THROWS_AS(block_from_string("obdd 3\n0 T0 - -\n1 T1 - -\n2 1 0 2\n", mgr), ParseError);
}

TEST_CASE("node budget") {
  Manager mgr(VarOrder(iota_vars(12)), 20);
  NodeRef acc = mgr.one();
  CHECK_THROWS_AS(
      [&] {
        for (Var v = 1; v <= 12; v += 2)
          acc = mgr.apply(Op::Xor, acc, mgr.conj(mgr.literal(v), mgr.literal(v + 1)));
      }(),
      BudgetExceeded);
}
