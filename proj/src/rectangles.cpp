#include "qobdd/rectangles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace qobdd {

std::optional<int> Partition::side(Vertex v) const {
  if (std::find(x1.begin(), x1.end(), v) != x1.end())
    return 0;
  if (std::find(x2.begin(), x2.end(), v) != x2.end())
    return 1;
  return std::nullopt;
}

double Partition::balance() const {
  const std::size_t n = x1.size() + x2.size();
  return n == 0 ? 0 : static_cast<double>(std::min(x1.size(), x2.size())) / static_cast<double>(n);
}

Partition pair_partition(std::size_t n) {
  Partition p;
  for (Vertex v = 1; v <= n; ++v)
    (v % 2 ? p.x1 : p.x2).push_back(v);
  return p;
}

Partition random_partition(std::size_t n, std::mt19937_64 &rng) {
  std::vector<Vertex> vs(n);
  for (std::size_t i = 0; i < n; ++i)
    vs[i] = static_cast<Vertex>(i + 1);
  std::shuffle(vs.begin(), vs.end(), rng);
  Partition p;
  p.x1.assign(vs.begin(), vs.begin() + static_cast<std::ptrdiff_t>(n / 2));
  p.x2.assign(vs.begin() + static_cast<std::ptrdiff_t>(n / 2), vs.end());
  std::sort(p.x1.begin(), p.x1.end());
  std::sort(p.x2.begin(), p.x2.end());
  return p;
}

TruthTable::TruthTable(std::vector<Var> x1, std::vector<Var> x2) : x1_(std::move(x1)), x2_(std::move(x2)) {
  if (x1_.size() > kSideLimit || x2_.size() > kSideLimit || x1_.size() + x2_.size() > kTotalLimit)
    throw Error("truth table " + std::to_string(x1_.size()) + "|" + std::to_string(x2_.size()) +
                " exceeds the size limit");
  words_ = static_cast<std::size_t>((cols() + 63) / 64);
  bits_.assign(static_cast<std::size_t>(rows()) * words_, 0);
}

TruthTable TruthTable::of(std::vector<Var> x1, std::vector<Var> x2,
                          const std::function<bool(std::span<const std::uint8_t>)> &f) {
  TruthTable t(std::move(x1), std::move(x2));
  for (std::uint64_t r = 0; r < t.rows(); ++r)
    for (std::uint64_t c = 0; c < t.cols(); ++c)
      t.set(r, c, f(t.assignment(r, c)));
  return t;
}

bool TruthTable::get(std::uint64_t r, std::uint64_t c) const {
  return (bits_[r * words_ + (c >> 6)] >> (c & 63)) & 1u;
}

void TruthTable::set(std::uint64_t r, std::uint64_t c, bool v) {
  auto &w = bits_[r * words_ + (c >> 6)];
  const std::uint64_t m = std::uint64_t{1} << (c & 63);
  w = v ? (w | m) : (w & ~m);
}

Assignment TruthTable::assignment(std::uint64_t r, std::uint64_t c) const {
  Var max = 0;
  for (Var v : x1_)
    max = std::max(max, v);
  for (Var v : x2_)
    max = std::max(max, v);
  Assignment a(max + 1, 0);
  for (std::size_t i = 0; i < x1_.size(); ++i)
    a[x1_[i]] = (r >> i) & 1u;
  for (std::size_t j = 0; j < x2_.size(); ++j)
    a[x2_[j]] = (c >> j) & 1u;
  return a;
}

bool eval_ipg(const Graph &g, std::span<const std::uint8_t> a) {
  if (a.size() <= g.vertex_count())
    throw Error("assignment does not cover the graph");
  bool x = false;
  for (auto [u, v] : g.edges())
    x ^= a[u] && a[v];
  return x;
}

TruthTable ipg_table(const Graph &g, const Partition &part) {
  if (part.x1.size() + part.x2.size() != g.vertex_count())
    throw Error("partition does not cover the graph");
  return TruthTable::of(part.x1, part.x2, [&](std::span<const std::uint8_t> a) {
    std::vector<std::uint8_t> full(g.vertex_count() + 1, 0);
    std::copy_n(a.begin(), std::min(a.size(), full.size()), full.begin());
    return eval_ipg(g, full);
  });
}

namespace {

class Bits {
public:
  explicit Bits(std::size_t n = 0) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const noexcept { return n_; }
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void fill() {
    for (std::size_t i = 0; i < n_; ++i)
      set(i);
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_)
      c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool any() const {
    return std::any_of(w_.begin(), w_.end(), [](std::uint64_t w) { return w != 0; });
  }
  Bits operator&(const Bits &o) const {
    Bits r(n_);
    for (std::size_t i = 0; i < w_.size(); ++i)
      r.w_[i] = w_[i] & o.w_[i];
    return r;
  }
  bool subset_of(const Bits &o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i])
        return false;
    return true;
  }
  /// Equal on positions [0, k).
  bool equal_below(const Bits &o, std::size_t k) const {
    const std::size_t full = k >> 6;
    for (std::size_t i = 0; i < full; ++i)
      if (w_[i] != o.w_[i])
        return false;
    if (k & 63) {
      const std::uint64_t m = (std::uint64_t{1} << (k & 63)) - 1;
      if ((w_[full] ^ o.w_[full]) & m)
        return false;
    }
    return true;
  }
  std::vector<std::uint64_t> members() const {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < n_; ++i)
      if (test(i))
        out.push_back(i);
    return out;
  }

private:
  std::size_t n_;
  std::vector<std::uint64_t> w_;
};

struct CloseByOne {
  const std::vector<Bits> &rowsets;   // per row: columns of the searched color
  std::size_t nrows, ncols;
  std::uint64_t best = 0;
  Bits best_a, best_b;

  Bits rows_of(const Bits &b) const {
    Bits a(nrows);
    for (std::size_t r = 0; r < nrows; ++r)
      if (b.subset_of(rowsets[r]))
        a.set(r);
    return a;
  }

  void visit(const Bits &a, const Bits &b, std::size_t from) {
    const std::uint64_t area = static_cast<std::uint64_t>(a.count()) * b.count();
    if (area > best) {
      best = area;
      best_a = a;
      best_b = b;
    }
    const std::size_t have = a.count();
    std::size_t above = 0;   // rows >= j outside a
    for (std::size_t r = from; r < nrows; ++r)
      above += !a.test(r);
    for (std::size_t j = from; j < nrows; ++j) {
      if (a.test(j))
        continue;
      const Bits b2 = b & rowsets[j];
      const std::uint64_t width = b2.count();
      if (width * (have + above) > best && width > 0) {
        const Bits a2 = rows_of(b2);
        if (a2.equal_below(a, j))
          visit(a2, b2, j + 1);
      }
      --above;
    }
  }
};

} // namespace

MonoRectangle max_mono_rectangle(const TruthTable &tt) {
  const auto nrows = static_cast<std::size_t>(tt.rows());
  const auto ncols = static_cast<std::size_t>(tt.cols());
  MonoRectangle out;
  for (bool color : {false, true}) {
    std::vector<Bits> rowsets(nrows, Bits(ncols));
    for (std::size_t r = 0; r < nrows; ++r)
      for (std::size_t c = 0; c < ncols; ++c)
        if (tt.get(r, c) == color)
          rowsets[r].set(c);
    CloseByOne cbo{rowsets, nrows, ncols, out.size, Bits(), Bits()};
    Bits all(ncols);
    all.fill();
    const Bits a0 = cbo.rows_of(all);
    Bits b0 = all;
    for (std::size_t r = 0; r < nrows; ++r)
      if (a0.test(r))
        b0 = b0 & rowsets[r];
    cbo.visit(a0, b0, 0);
    if (cbo.best > out.size) {
      out.size = cbo.best;
      out.color = color;
      out.rows = cbo.best_a.members();
      out.cols = cbo.best_b.members();
    }
  }
  return out;
}

bool is_induced_matching(const Graph &g, std::span<const Edge> edges) {
  std::vector<int> owner(g.vertex_count() + 1, -1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [x, y] = edges[i];
    if (x == 0 || y == 0 || x > g.vertex_count() || y > g.vertex_count() || !g.has_edge(x, y))
      return false;
    if (owner[x] != -1 || owner[y] != -1)
      return false;
    owner[x] = owner[y] = static_cast<int>(i);
  }
  for (auto [u, v] : g.edges())
    if (owner[u] != -1 && owner[v] != -1 && owner[u] != owner[v])
      return false;
  return true;
}

Matching induced_matching(const Graph &g, const Partition &part) {
  const std::size_t n = g.vertex_count();
  std::vector<std::uint8_t> alive(n + 1, 1), in_x2(n + 1, 0);
  for (Vertex v : part.x2)
    if (v <= n)
      in_x2[v] = 1;
  std::vector<Vertex> x1 = part.x1;
  std::sort(x1.begin(), x1.end());
  Matching m;
  for (Vertex x : x1) {
    if (x > n || !alive[x])
      continue;
    Vertex y = 0;
    for (Vertex w : g.neighbors(x))
      if (alive[w] && in_x2[w]) {
        y = w;
        break;
      }
    if (y == 0)
      continue;
    m.edges.push_back({x, y});
    for (Vertex v : {x, y}) {
      alive[v] = 0;
      for (Vertex w : g.neighbors(v))
        alive[w] = 0;
    }
  }
  m.induced = is_induced_matching(g, m.edges);
  return m;
}

RectangleReport check_rectanglesmall(const Graph &g, const Partition &part) {
  RectangleReport rep;
  rep.n = g.vertex_count();
  rep.matching = induced_matching(g, part);
  rep.m = rep.matching.edges.size();
  rep.balance = part.balance();
  if (rep.n - rep.m >= 64)
    throw Error("bound does not fit in 64 bits");
  rep.bound = std::uint64_t{1} << (rep.n - rep.m);
  rep.oracle = max_mono_rectangle(ipg_table(g, part));
  rep.holds = rep.matching.induced && rep.oracle.size <= rep.bound;
  rep.protocol_lower_bound =
      std::ldexp(1.0, static_cast<int>(rep.n)) / (4 * std::numbers::e * static_cast<double>(rep.oracle.size));
  return rep;
}

const char *gi_form_name(GiForm f) noexcept {
  switch (f) {
  case GiForm::And:
    return "x&y";
  case GiForm::AndNotY:
    return "x&~y";
  case GiForm::NotXAnd:
    return "~x&y";
  case GiForm::Or:
    return "x|y";
  }
  return "?";
}

bool eval_gi(GiForm f, bool x, bool y) noexcept {
  switch (f) {
  case GiForm::And:
    return x && y;
  case GiForm::AndNotY:
    return x && !y;
  case GiForm::NotXAnd:
    return !x && y;
  case GiForm::Or:
    return x || y;
  }
  return false;
}

std::vector<GiTerm> gi_decomposition(const Graph &g, const Matching &mt, std::span<const std::uint8_t> a) {
  if (a.size() <= g.vertex_count())
    throw Error("assignment does not cover the graph");
  if (!is_induced_matching(g, mt.edges))
    throw Error("not an induced matching");
  std::vector<GiTerm> out;
  for (auto [x, y] : mt.edges) {
    GiTerm t{{x, y}, false, false, GiForm::And};
    for (Vertex w : g.neighbors(x))
      if (w != y)
        t.px ^= a[w] != 0;
    for (Vertex w : g.neighbors(y))
      if (w != x)
        t.py ^= a[w] != 0;
    t.form = t.px ? (t.py ? GiForm::Or : GiForm::AndNotY) : (t.py ? GiForm::NotXAnd : GiForm::And);

    // Direct count of the edges at x or y with both ends 1.
    std::vector<std::uint8_t> b(a.begin(), a.end());
    for (int bx : {0, 1})
      for (int by : {0, 1}) {
        b[x] = static_cast<std::uint8_t>(bx);
        b[y] = static_cast<std::uint8_t>(by);
        bool parity = false;
        for (auto [u, v] : g.edges())
          if ((u == x || u == y || v == x || v == y) && b[u] && b[v])
            parity = !parity;
        if (parity != eval_gi(t.form, bx, by))
          throw Error("edge function does not match its form");
      }
    out.push_back(t);
  }
  return out;
}

std::vector<GiTerm> gi_decomposition(const Graph &g, const Partition &part, std::span<const std::uint8_t> a) {
  return gi_decomposition(g, induced_matching(g, part), a);
}

} // namespace qobdd
