/// @file  graph.hpp
/// @brief Simple graphs, primal graphs and path decompositions

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qobdd/obdd.hpp"

namespace qobdd {

class Pcnf;

/// 1-based vertex id; for primal graphs vertex v is variable v.
using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Simple undirected graph on vertices 1..n.
class Graph {
public:
  explicit Graph(std::size_t n = 0) : adj_(n + 1) {}

  std::size_t vertex_count() const noexcept { return adj_.size() - 1; }
  /// Adds `uv` unless present. Throws Error on loops or unknown vertices.
  void add_edge(Vertex u, Vertex v);
  bool has_edge(Vertex u, Vertex v) const;
  /// Sorted neighbor list.
  const std::vector<Vertex> &neighbors(Vertex v) const { return adj_.at(v); }
  /// Edges `(u, v)` with `u < v`, sorted lexicographically.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const noexcept;
  std::size_t max_degree() const noexcept;

private:
  std::vector<std::vector<Vertex>> adj_;
};

/// Edge list: one `<u> <v>` pair per line, `#` or `c` lines are comments.
/// The vertex count is the largest id unless a `p <n>` line declares more.
Graph read_edge_list(std::istream &in);
Graph read_edge_list(const std::string &text);
void write_edge_list(std::ostream &out, const Graph &g);

/// Vertices are the variables 1..num_vars; `xy` is an edge iff `x` and `y`
/// occur together in some clause.
Graph primal_graph(const Pcnf &f);

struct PathDecomposition {
  std::vector<std::vector<Vertex>> bags;

  /// Largest bag size minus one (-1 for no bags).
  long width() const noexcept;
  /// Checks vertex coverage, edge coverage and contiguity of every vertex's
  /// bag interval. Returns a description of the first violation.
  std::optional<std::string> validate(const Graph &g) const;
};

/// Heuristic path decomposition. Candidate vertex layouts (min-fill and
/// min-degree elimination orders, both directions, and a greedy
/// frontier-minimizing layout) are turned into vertex-separation
/// decompositions; the narrowest one is returned. Always valid, rarely
/// optimal.
PathDecomposition path_decomposition(const Graph &g);

/// Vertices ordered by the index of the first bag containing them; ties by
/// ascending id.
VarOrder order_from_decomposition(const PathDecomposition &pd);

/// Uniformly paired random `degree`-regular simple graph (pairing model with
/// rejection). Throws Error when `n * degree` is odd or `degree >= n`.
Graph random_dregular(std::size_t n, std::size_t degree, std::uint64_t seed);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational &a, const Rational &b) {
    return a.num * b.den == b.num * a.den;
  }
  friend bool operator<(const Rational &a, const Rational &b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Rational &a, const Rational &b) { return !(b < a); }
};

inline constexpr std::size_t kExpansionVertexLimit = 20;

/// min over nonempty V' with |V'| <= |V|/2 of |N(V')| / |V'|, N the open
/// neighborhood. Exhaustive; throws Error above kExpansionVertexLimit.
Rational expansion(const Graph &g);

} // namespace qobdd
