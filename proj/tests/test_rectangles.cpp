#include <doctest.h>

#include <algorithm>
#include <random>

#include "qobdd/rectangles.hpp"

using namespace qobdd;

namespace {

/// Max |A|·|B| over all nonempty row and column subsets on which the table
/// is constant.
std::uint64_t naive_max(const TruthTable &t) {
  std::uint64_t best = 0;
  const std::uint64_t R = t.rows(), C = t.cols();
  for (std::uint64_t a = 1; a < (std::uint64_t{1} << R); ++a)
    for (std::uint64_t b = 1; b < (std::uint64_t{1} << C); ++b) {
      int seen = -1;
      bool mono = true;
      for (std::uint64_t r = 0; r < R && mono; ++r)
        if ((a >> r) & 1u)
          for (std::uint64_t c = 0; c < C && mono; ++c)
            if ((b >> c) & 1u) {
              const int v = t.get(r, c);
              mono = seen == -1 || seen == v;
              seen = v;
            }
      if (mono)
        best = std::max<std::uint64_t>(best, std::popcount(a) * std::popcount(b));
    }
  return best;
}

/// For every row subset A, the columns constant on A for each color.
std::uint64_t row_subset_max(const TruthTable &t) {
  std::uint64_t best = 0;
  const std::uint64_t R = t.rows(), C = t.cols();
  for (std::uint64_t a = 1; a < (std::uint64_t{1} << R); ++a)
    for (bool color : {false, true}) {
      std::uint64_t cols = 0;
      for (std::uint64_t c = 0; c < C; ++c) {
        bool ok = true;
        for (std::uint64_t r = 0; r < R && ok; ++r)
          if ((a >> r) & 1u)
            ok = t.get(r, c) == color;
        cols += ok;
      }
      best = std::max<std::uint64_t>(best, std::popcount(a) * cols);
    }
  return best;
}

void check_witness(const TruthTable &t, const MonoRectangle &m) {
  CHECK(m.size == m.rows.size() * m.cols.size());
  for (auto r : m.rows)
    for (auto c : m.cols)
      CHECK(t.get(r, c) == m.color);
}

Graph matching_graph(std::size_t n) {
  Graph g(2 * n);
  for (Vertex i = 1; i <= n; ++i)
    g.add_edge(2 * i - 1, 2 * i);
  return g;
}

Graph random_graph(std::size_t n, double p, std::mt19937_64 &rng) {
  Graph g(n);
  std::bernoulli_distribution coin(p);
  for (Vertex a = 1; a <= n; ++a)
    for (Vertex b = a + 1; b <= n; ++b)
      if (coin(rng))
        g.add_edge(a, b);
  return g;
}

/// x_i = 2i-1 on the left, y_i = 2i on the right.
TruthTable forms_table(const std::vector<GiForm> &forms) {
  const std::size_t n = forms.size();
  const Partition p = pair_partition(2 * n);
  return TruthTable::of(p.x1, p.x2, [&](std::span<const std::uint8_t> a) {
    bool x = false;
    for (std::size_t i = 0; i < n; ++i)
      x ^= eval_gi(forms[i], a[2 * i + 1], a[2 * i + 2]);
    return x;
  });
}

} // namespace

TEST_CASE("graph inner product") {
  Graph edge(2);
  edge.add_edge(1, 2);
  CHECK(eval_ipg(edge, std::vector<std::uint8_t>{0, 1, 1}));
  CHECK_FALSE(eval_ipg(edge, std::vector<std::uint8_t>{0, 0, 1}));
  CHECK_THROWS_AS(eval_ipg(edge, std::vector<std::uint8_t>{0, 1}), Error);

  for (std::size_t n = 1; n <= 6; ++n) {
    const Graph g = matching_graph(n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (2 * n)); ++bits) {
      std::vector<std::uint8_t> a(2 * n + 1, 0);
      for (std::size_t i = 0; i < 2 * n; ++i)
        a[i + 1] = (bits >> i) & 1u;
      bool ip = false;
      for (std::size_t i = 0; i < n; ++i)
        ip ^= a[2 * i + 1] && a[2 * i + 2];
      CHECK(eval_ipg(g, a) == ip);
    }
  }

  // Relabeling the vertices and the assignment together changes nothing.
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 7;
    const Graph g = random_graph(n, 0.4, rng);
    std::vector<Vertex> pi(n + 1);
    for (Vertex v = 0; v <= n; ++v)
      pi[v] = v;
    std::shuffle(pi.begin() + 1, pi.end(), rng);
    Graph h(n);
    for (auto [u, v] : g.edges())
      h.add_edge(pi[u], pi[v]);
    for (std::uint64_t bits = 0; bits < (1u << n); ++bits) {
      std::vector<std::uint8_t> a(n + 1, 0), b(n + 1, 0);
      for (Vertex v = 1; v <= n; ++v) {
        a[v] = (bits >> (v - 1)) & 1u;
        b[pi[v]] = a[v];
      }
      CHECK(eval_ipg(g, a) == eval_ipg(h, b));
    }
  }
}

TEST_CASE("truth tables") {
  TruthTable t({3, 1}, {2});
  CHECK(t.rows() == 4);
  CHECK(t.cols() == 2);
  t.set(2, 1, true);
  CHECK(t.get(2, 1));
  CHECK_FALSE(t.get(1, 1));
  const Assignment a = t.assignment(2, 1);
  CHECK(a == Assignment{0, 1, 1, 0});
  CHECK_THROWS_AS(TruthTable(std::vector<Var>(17, 1), {}), Error);
  std::vector<Var> twelve(12);
  CHECK_THROWS_AS(TruthTable(twelve, std::vector<Var>(13)), Error);
}

TEST_CASE("maximum rectangles agree with naive enumeration on every 2|2 function") {
  for (std::uint32_t f = 0; f < (1u << 16); ++f) {
    TruthTable t({1, 2}, {3, 4});
    for (std::uint64_t r = 0; r < 4; ++r)
      for (std::uint64_t c = 0; c < 4; ++c)
        t.set(r, c, (f >> (4 * r + c)) & 1u);
    const MonoRectangle m = max_mono_rectangle(t);
    REQUIRE(m.size == naive_max(t));
    if ((f & 0x3ff) == 0)
      check_witness(t, m);
  }
}

TEST_CASE("maximum rectangles on larger random tables") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 60; ++k) {
    const std::size_t r = 2 + k % 3, c = 2 + (k / 3) % 3;
    std::vector<Var> x1, x2;
    for (Var v = 1; v <= r; ++v)
      x1.push_back(v);
    for (Var v = 1; v <= c; ++v)
      x2.push_back(static_cast<Var>(r + v));
    std::bernoulli_distribution coin(k % 2 ? 0.5 : 0.2);
    const TruthTable t = TruthTable::of(x1, x2, [&](std::span<const std::uint8_t>) { return coin(rng); });
    const MonoRectangle m = max_mono_rectangle(t);
    CHECK(m.size == row_subset_max(t));
    check_witness(t, m);
  }
}

TEST_CASE("inner product rectangles") {
  // [[0,0],[0,1]]: the best 0-rectangle is a full row or column.
  const TruthTable one = ipg_table(matching_graph(1), pair_partition(2));
  CHECK(max_mono_rectangle(one).size == 2);
  CHECK_FALSE(max_mono_rectangle(one).color);

  const TruthTable zero = TruthTable::of({1, 2, 3}, {4, 5}, [](std::span<const std::uint8_t>) { return false; });
  CHECK(max_mono_rectangle(zero).size == 32);

  std::vector<std::uint64_t> maxima;
  for (std::size_t n = 1; n <= 4; ++n) {
    const MonoRectangle m = max_mono_rectangle(ipg_table(matching_graph(n), pair_partition(2 * n)));
    CHECK(m.size <= (std::uint64_t{1} << n));
    maxima.push_back(m.size);
  }
  // Rows x = 0 against every y: a 0-rectangle of size 2^n.
  CHECK(maxima == std::vector<std::uint64_t>{2, 4, 8, 16});
}

TEST_CASE("mixed edge functions keep rectangles small") {
  const std::vector<GiForm> all{GiForm::And, GiForm::AndNotY, GiForm::NotXAnd, GiForm::Or};
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t mixes = 1;
    for (std::size_t i = 0; i < n; ++i)
      mixes *= 4;
    for (std::size_t code = 0; code < mixes; ++code) {
      std::vector<GiForm> forms;
      for (std::size_t i = 0, c = code; i < n; ++i, c /= 4)
        forms.push_back(all[c % 4]);
      CHECK(max_mono_rectangle(forms_table(forms)).size <= (std::uint64_t{1} << n));
    }
  }
}

TEST_CASE("greedy induced matchings") {
  Graph edge(2);
  edge.add_edge(1, 2);
  CHECK(induced_matching(edge, {{1}, {2}}).edges.size() == 1);
  CHECK(induced_matching(edge, {{1, 2}, {}}).edges.empty());

  Graph c4(4);
  c4.add_edge(1, 2);
  c4.add_edge(2, 3);
  c4.add_edge(3, 4);
  c4.add_edge(4, 1);
  const Matching m = induced_matching(c4, {{1, 3}, {2, 4}});
  CHECK(m.edges == std::vector<Edge>{{1, 2}});
  CHECK(m.induced);

  CHECK(is_induced_matching(matching_graph(3), std::vector<Edge>{{1, 2}, {3, 4}, {5, 6}}));
  CHECK_FALSE(is_induced_matching(c4, std::vector<Edge>{{1, 2}, {3, 4}}));
  CHECK_FALSE(is_induced_matching(c4, std::vector<Edge>{{1, 3}}));

  std::mt19937_64 rng(21);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 11;
    const Graph g = random_graph(n, 0.3, rng);
    const Partition p = random_partition(n, rng);
    const Matching mt = induced_matching(g, p);
    CHECK(mt.induced);
    bool cross = false;
    for (auto [u, v] : g.edges())
      cross = cross || p.side(u) != p.side(v);
    CHECK((mt.edges.size() >= 1) == cross);
    for (auto [x, y] : mt.edges) {
      CHECK(p.side(x) == 0);
      CHECK(p.side(y) == 1);
    }
  }
}

TEST_CASE("rectangle bound from induced matchings") {
  const RectangleReport m3 = check_rectanglesmall(matching_graph(3), pair_partition(6));
  CHECK(m3.m == 3);
  CHECK(m3.bound == 8);
  CHECK(m3.oracle.size <= 8);
  CHECK(m3.holds);
  CHECK(m3.balance == 0.5);

  Graph edge(2);
  edge.add_edge(1, 2);
  const RectangleReport e = check_rectanglesmall(edge, pair_partition(2));
  CHECK(e.bound == 2);
  CHECK(e.oracle.size == 2);

  const RectangleReport empty = check_rectanglesmall(Graph(4), pair_partition(4));
  CHECK(empty.m == 0);
  CHECK(empty.bound == 16);
  CHECK(empty.oracle.size == 16);
  CHECK(empty.holds);

  std::mt19937_64 rng(99);
  int positive = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 4 + k % 7;
    const Graph g = random_graph(n, 0.2 + 0.1 * (k % 5), rng);
    const Partition p = random_partition(n, rng);
    const RectangleReport r = check_rectanglesmall(g, p);
    CHECK(r.holds);
    CHECK(r.oracle.size <= r.bound);
    CHECK(r.matching.induced);
    positive += r.m > 0;
  }
  CHECK(positive > 25);
}

TEST_CASE("edge functions under a residual assignment") {
  // Isolated matching edge.
  Graph edge(3);
  edge.add_edge(1, 2);
  auto terms = gi_decomposition(edge, Partition{{1}, {2, 3}}, std::vector<std::uint8_t>{0, 0, 0, 1});
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].form == GiForm::And);

  // Path 3 - 1 - 2 with x = 1 in X1.
  Graph path(3);
  path.add_edge(1, 2);
  path.add_edge(1, 3);
  terms = gi_decomposition(path, Partition{{1}, {2, 3}}, std::vector<std::uint8_t>{0, 0, 0, 1});
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].px);
  CHECK_FALSE(terms[0].py);
  CHECK(terms[0].form == GiForm::AndNotY);

  // Path 1 - 2 - 3: the extra neighbor is at y.
  Graph path2(3);
  path2.add_edge(1, 2);
  path2.add_edge(2, 3);
  terms = gi_decomposition(path2, Partition{{1}, {2, 3}}, std::vector<std::uint8_t>{0, 0, 0, 1});
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].form == GiForm::NotXAnd);

  // 3 - 1 - 2 - 4 with both outer vertices set.
  Graph four(4);
  four.add_edge(1, 2);
  four.add_edge(1, 3);
  four.add_edge(2, 4);
  terms = gi_decomposition(four, Partition{{1}, {2, 3, 4}}, std::vector<std::uint8_t>{0, 0, 0, 1, 1});
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].form == GiForm::Or);

  CHECK_THROWS_AS(gi_decomposition(four, Partition{{1}, {2, 3, 4}}, std::vector<std::uint8_t>{0, 0}), Error);

  // IP_G with X' fixed is ⊕ g_i plus a constant: compare on random graphs.
  std::mt19937_64 rng(6);
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = 4 + k % 6;
    const Graph g = random_graph(n, 0.35, rng);
    const Partition p = random_partition(n, rng);
    const Matching mt = induced_matching(g, p);
    std::vector<std::uint8_t> a(n + 1, 0);
    for (Vertex v = 1; v <= n; ++v)
      a[v] = rng() & 1u;
    const auto gi = gi_decomposition(g, mt, a);
    const std::size_t m = gi.size();
    std::vector<std::uint8_t> base = a;
    for (const auto &t : gi)
      base[t.edge.first] = base[t.edge.second] = 0;
    const bool c = eval_ipg(g, base);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (2 * m)); ++bits) {
      std::vector<std::uint8_t> b = base;
      bool expected = c;
      for (std::size_t i = 0; i < m; ++i) {
        const bool x = (bits >> (2 * i)) & 1u, y = (bits >> (2 * i + 1)) & 1u;
        b[gi[i].edge.first] = x;
        b[gi[i].edge.second] = y;
        expected ^= eval_gi(gi[i].form, x, y);
      }
      CHECK(eval_ipg(g, b) == expected);
    }
  }
}
