#include "qobdd/graph.hpp"

#include <algorithm>
#include <climits>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "qobdd/pcnf.hpp"
#include "qobdd/text.hpp"

namespace qobdd {

void Graph::add_edge(Vertex u, Vertex v) {
  if (u == 0 || v == 0 || u > vertex_count() || v > vertex_count())
    throw Error("edge " + std::to_string(u) + "-" + std::to_string(v) + " out of range");
  if (u == v)
    throw Error("self-loop on vertex " + std::to_string(u));
  auto insert = [](std::vector<Vertex> &list, Vertex w) {
    auto it = std::lower_bound(list.begin(), list.end(), w);
    if (it == list.end() || *it != w)
      list.insert(it, w);
  };
  insert(adj_[u], v);
  insert(adj_[v], u);
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  if (u == 0 || u > vertex_count())
    return false;
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (Vertex u = 1; u <= vertex_count(); ++u)
    for (Vertex v : adj_[u])
      if (u < v)
        out.emplace_back(u, v);
  return out;
}

std::size_t Graph::edge_count() const noexcept {
  std::size_t twice = 0;
  for (const auto &list : adj_)
    twice += list.size();
  return twice / 2;
}

std::size_t Graph::max_degree() const noexcept {
  std::size_t d = 0;
  for (const auto &list : adj_)
    d = std::max(d, list.size());
  return d;
}

Graph read_edge_list(std::istream &in) {
  LineReader reader(in);
  std::string line;
  std::vector<Edge> edges;
  std::size_t n = 0;
  while (reader.next(line)) {
    auto tok = split_ws(line);
    if (tok[0] == "#" || tok[0] == "c" || tok[0][0] == '#')
      continue;
    if (tok[0] == "p") {
      if (tok.size() != 2)
        throw ParseError(reader.line_no(), "expected 'p <vertices>'");
      n = std::max<std::size_t>(n, parse_uint(tok[1], reader.line_no()));
      continue;
    }
    if (tok.size() != 2)
      throw ParseError(reader.line_no(), "expected '<u> <v>'");
    const auto u = parse_uint(tok[0], reader.line_no());
    const auto v = parse_uint(tok[1], reader.line_no());
    if (u == 0 || v == 0)
      throw ParseError(reader.line_no(), "vertex ids are 1-based");
    if (u == v)
      throw ParseError(reader.line_no(), "self-loop");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    n = std::max<std::size_t>({n, u, v});
  }
  Graph g(n);
  for (auto [u, v] : edges)
    g.add_edge(u, v);
  return g;
}

Graph read_edge_list(const std::string &text) {
  std::istringstream in(text);
  return read_edge_list(in);
}

void write_edge_list(std::ostream &out, const Graph &g) {
  out << "p " << g.vertex_count() << '\n';
  for (auto [u, v] : g.edges())
    out << u << ' ' << v << '\n';
}

Graph primal_graph(const Pcnf &f) {
  Graph g(f.num_vars());
  for (const auto &c : f.clauses())
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (var_of(c[i]) != var_of(c[j]))
          g.add_edge(var_of(c[i]), var_of(c[j]));
  return g;
}

// Path decompositions

long PathDecomposition::width() const noexcept {
  long w = -1;
  for (const auto &bag : bags)
    w = std::max(w, static_cast<long>(bag.size()) - 1);
  return w;
}

std::optional<std::string> PathDecomposition::validate(const Graph &g) const {
  const std::size_t n = g.vertex_count();
  std::vector<long> first(n + 1, -1), last(n + 1, -1);
  std::vector<std::size_t> count(n + 1, 0);
  for (std::size_t i = 0; i < bags.size(); ++i) {
    for (Vertex v : bags[i]) {
      if (v == 0 || v > n)
        return "bag " + std::to_string(i) + " contains unknown vertex " + std::to_string(v);
      if (first[v] < 0)
        first[v] = static_cast<long>(i);
      last[v] = static_cast<long>(i);
      ++count[v];
    }
  }
  for (Vertex v = 1; v <= n; ++v) {
    if (first[v] < 0)
      return "vertex " + std::to_string(v) + " is in no bag";
    if (count[v] != static_cast<std::size_t>(last[v] - first[v] + 1))
      return "bags containing vertex " + std::to_string(v) + " are not contiguous";
  }
  for (auto [u, v] : g.edges()) {
    bool covered = false;
    for (long i = std::max(first[u], first[v]); i <= std::min(last[u], last[v]); ++i) {
      const auto &bag = bags[static_cast<std::size_t>(i)];
      if (std::find(bag.begin(), bag.end(), u) != bag.end() &&
          std::find(bag.begin(), bag.end(), v) != bag.end()) {
        covered = true;
        break;
      }
    }
    if (!covered)
      return "edge " + std::to_string(u) + "-" + std::to_string(v) + " is in no bag";
  }
  return std::nullopt;
}

namespace {

/// Vertex-separation decomposition of a layout: bag i holds every vertex
/// placed at or before i that still has a neighbor at or after i.
PathDecomposition from_layout(const Graph &g, const std::vector<Vertex> &layout) {
  const std::size_t n = g.vertex_count();
  std::vector<std::size_t> pos(n + 1);
  for (std::size_t i = 0; i < layout.size(); ++i)
    pos[layout[i]] = i;
  std::vector<std::size_t> until(n + 1);
  for (Vertex v = 1; v <= n; ++v) {
    until[v] = pos[v];
    for (Vertex w : g.neighbors(v))
      until[v] = std::max(until[v], pos[w]);
  }
  PathDecomposition pd;
  std::vector<Vertex> open;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    open.push_back(layout[i]);
    std::vector<Vertex> bag = open;
    std::sort(bag.begin(), bag.end());
    pd.bags.push_back(std::move(bag));
    open.erase(std::remove_if(open.begin(), open.end(), [&](Vertex v) { return until[v] <= i; }),
               open.end());
  }
  return pd;
}

enum class Elimination { MinFill, MinDegree };

std::vector<Vertex> elimination_order(const Graph &g, Elimination rule) {
  const std::size_t n = g.vertex_count();
  std::vector<std::set<Vertex>> adj(n + 1);
  for (Vertex v = 1; v <= n; ++v)
    adj[v].insert(g.neighbors(v).begin(), g.neighbors(v).end());
  std::vector<bool> gone(n + 1, false);
  std::vector<Vertex> order;
  for (std::size_t step = 0; step < n; ++step) {
    Vertex best = 0;
    std::size_t best_score = SIZE_MAX;
    for (Vertex v = 1; v <= n; ++v) {
      if (gone[v])
        continue;
      std::size_t score = adj[v].size();
      if (rule == Elimination::MinFill) {
        score = 0;
        for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
          for (auto b = std::next(a); b != adj[v].end(); ++b)
            if (!adj[*a].count(*b))
              ++score;
      }
      if (score < best_score) {
        best_score = score;
        best = v;
      }
    }
    for (auto a = adj[best].begin(); a != adj[best].end(); ++a) {
      for (auto b = std::next(a); b != adj[best].end(); ++b) {
        adj[*a].insert(*b);
        adj[*b].insert(*a);
      }
      adj[*a].erase(best);
    }
    adj[best].clear();
    gone[best] = true;
    order.push_back(best);
  }
  return order;
}

std::vector<Vertex> greedy_frontier_layout(const Graph &g, Vertex start) {
  const std::size_t n = g.vertex_count();
  std::vector<bool> placed(n + 1, false);
  std::vector<std::size_t> unplaced_nbrs(n + 1);
  for (Vertex v = 1; v <= n; ++v)
    unplaced_nbrs[v] = g.neighbors(v).size();
  std::vector<Vertex> layout;
  std::size_t frontier = 0;
  auto place = [&](Vertex v) {
    placed[v] = true;
    layout.push_back(v);
    for (Vertex w : g.neighbors(v)) {
      if (placed[w] && --unplaced_nbrs[w] == 0)
        --frontier;
      else if (!placed[w])
        --unplaced_nbrs[w];
    }
    // unplaced_nbrs[v] now counts v's unplaced neighbors only.
    std::size_t open = 0;
    for (Vertex w : g.neighbors(v))
      open += placed[w] ? 0 : 1;
    unplaced_nbrs[v] = open;
    if (open > 0)
      ++frontier;
  };
  place(start);
  while (layout.size() < n) {
    Vertex best = 0;
    std::tuple<std::size_t, int, Vertex> best_key{SIZE_MAX, 0, 0};
    for (Vertex v = 1; v <= n; ++v) {
      if (placed[v])
        continue;
      std::size_t closes = 0, open = 0;
      bool touches = false;
      for (Vertex w : g.neighbors(v)) {
        if (placed[w]) {
          touches = true;
          if (unplaced_nbrs[w] == 1)
            ++closes;
        } else {
          ++open;
        }
      }
      const std::size_t next = frontier - closes + (open > 0 ? 1 : 0);
      std::tuple<std::size_t, int, Vertex> key{next, touches ? 0 : 1, v};
      if (key < best_key) {
        best_key = key;
        best = v;
      }
    }
    place(best);
  }
  return layout;
}

} // namespace

PathDecomposition path_decomposition(const Graph &g) {
  const std::size_t n = g.vertex_count();
  if (n == 0)
    return {};
  std::vector<std::vector<Vertex>> layouts;
  for (auto rule : {Elimination::MinFill, Elimination::MinDegree}) {
    auto order = elimination_order(g, rule);
    layouts.push_back(order);
    std::reverse(order.begin(), order.end());
    layouts.push_back(std::move(order));
  }
  // Greedy layouts from a few starting points: minimum-degree vertices and
  // the lowest id.
  std::vector<Vertex> starts{1};
  std::vector<Vertex> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 1);
  std::stable_sort(by_degree.begin(), by_degree.end(), [&](Vertex a, Vertex b) {
    return g.neighbors(a).size() < g.neighbors(b).size();
  });
  for (std::size_t i = 0; i < std::min<std::size_t>(4, n); ++i)
    starts.push_back(by_degree[i]);
  for (Vertex s : starts)
    layouts.push_back(greedy_frontier_layout(g, s));

  PathDecomposition best;
  long best_width = LONG_MAX;
  for (const auto &layout : layouts) {
    auto pd = from_layout(g, layout);
    if (pd.width() < best_width) {
      best_width = pd.width();
      best = std::move(pd);
    }
  }
  return best;
}

VarOrder order_from_decomposition(const PathDecomposition &pd) {
  std::vector<Var> order;
  std::set<Vertex> seen;
  for (const auto &bag : pd.bags) {
    std::vector<Vertex> fresh;
    for (Vertex v : bag)
      if (!seen.count(v))
        fresh.push_back(v);
    std::sort(fresh.begin(), fresh.end());
    for (Vertex v : fresh) {
      seen.insert(v);
      order.push_back(v);
    }
  }
  return VarOrder(std::move(order));
}

Graph random_dregular(std::size_t n, std::size_t degree, std::uint64_t seed) {
  if ((n * degree) % 2 != 0)
    throw Error("n * degree must be even");
  if (degree >= n && !(degree == 0))
    throw Error("degree must be smaller than the vertex count");
  std::mt19937_64 rng(seed);
  std::vector<Vertex> points;
  for (Vertex v = 1; v <= n; ++v)
    for (std::size_t k = 0; k < degree; ++k)
      points.push_back(v);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::shuffle(points.begin(), points.end(), rng);
    Graph g(n);
    bool simple = true;
    for (std::size_t i = 0; i < points.size() && simple; i += 2) {
      const Vertex u = points[i], v = points[i + 1];
      if (u == v || g.has_edge(u, v))
        simple = false;
      else
        g.add_edge(u, v);
    }
    if (simple)
      return g;
  }
  throw Error("failed to sample a simple regular graph");
}

Rational expansion(const Graph &g) {
  const std::size_t n = g.vertex_count();
  if (n > kExpansionVertexLimit)
    throw Error("exhaustive expansion is limited to " + std::to_string(kExpansionVertexLimit) +
                " vertices");
  if (n < 2)
    throw Error("expansion needs at least two vertices");
  std::vector<std::uint32_t> adj(n, 0);
  for (auto [u, v] : g.edges()) {
    adj[u - 1] |= 1u << (v - 1);
    adj[v - 1] |= 1u << (u - 1);
  }
  const std::uint32_t full = 1u << n;
  std::vector<std::uint32_t> reach(full, 0);
  Rational best{0, 0};
  for (std::uint32_t s = 1; s < full; ++s) {
    const int low = __builtin_ctz(s);
    reach[s] = reach[s & (s - 1)] | adj[static_cast<std::size_t>(low)];
    const auto size = static_cast<std::int64_t>(__builtin_popcount(s));
    if (2 * static_cast<std::size_t>(size) > n)
      continue;
    const Rational r{__builtin_popcount(reach[s] & ~s), size};
    if (best.den == 0 || r < best)
      best = r;
  }
  return best;
}

} // namespace qobdd
