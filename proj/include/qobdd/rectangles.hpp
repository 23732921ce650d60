/// @file  rectangles.hpp
/// @brief Graph inner products, exact maximum monochromatic rectangles and
///        induced-matching bounds

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "qobdd/graph.hpp"
#include "qobdd/obdd.hpp"

namespace qobdd {

/// Split of a vertex (variable) set into two sides.
struct Partition {
  std::vector<Vertex> x1, x2;

  /// 0 for x1, 1 for x2, nullopt for vertices on neither side.
  std::optional<int> side(Vertex v) const;
  double balance() const;
};

/// x1 = odd vertices, x2 = even vertices: splits the matching 1-2, 3-4, ...
Partition pair_partition(std::size_t n);
/// Random split of 1..n with sides of size floor(n/2) and ceil(n/2).
Partition random_partition(std::size_t n, std::mt19937_64 &rng);

/// Value matrix of a function over x1 ∪ x2. Row index bit i is the value of
/// x1[i], column index bit j the value of x2[j].
class TruthTable {
public:
  static constexpr std::size_t kSideLimit = 16;
  static constexpr std::size_t kTotalLimit = 24;

  /// Throws Error beyond the side or total limits.
  TruthTable(std::vector<Var> x1, std::vector<Var> x2);
  /// `f` receives an assignment indexed by variable id.
  static TruthTable of(std::vector<Var> x1, std::vector<Var> x2,
                       const std::function<bool(std::span<const std::uint8_t>)> &f);

  const std::vector<Var> &x1() const noexcept { return x1_; }
  const std::vector<Var> &x2() const noexcept { return x2_; }
  std::uint64_t rows() const noexcept { return std::uint64_t{1} << x1_.size(); }
  std::uint64_t cols() const noexcept { return std::uint64_t{1} << x2_.size(); }
  bool get(std::uint64_t r, std::uint64_t c) const;
  void set(std::uint64_t r, std::uint64_t c, bool v);
  Assignment assignment(std::uint64_t r, std::uint64_t c) const;

private:
  std::vector<Var> x1_, x2_;
  std::size_t words_;   // words per row
  std::vector<std::uint64_t> bits_;
};

/// ⊕ over the edges uv of a(u)·a(v); `a` is indexed by vertex id.
bool eval_ipg(const Graph &g, std::span<const std::uint8_t> a);
TruthTable ipg_table(const Graph &g, const Partition &part);

struct MonoRectangle {
  std::uint64_t size = 0;
  bool color = false;
  std::vector<std::uint64_t> rows, cols;
};

/// Largest A × B on which `tt` is constant. Maximal rectangles of each color
/// are enumerated as closed row sets (close-by-one), pruned by the best size
/// found so far. Ties keep the first found, color 0 first.
MonoRectangle max_mono_rectangle(const TruthTable &tt);

struct Matching {
  std::vector<Edge> edges;   ///< (x, y) with x in x1 and y in x2
  bool induced = false;
};

/// Pairwise disjoint edges of g, and no edge of g joins endpoints of two
/// different ones.
bool is_induced_matching(const Graph &g, std::span<const Edge> edges);

/// Greedy cross-partition induced matching: repeatedly take the lowest x in
/// x1 with a remaining neighbor in x2, pair it with its lowest such neighbor
/// y, and delete the closed neighborhoods of x and y.
Matching induced_matching(const Graph &g, const Partition &part);

struct RectangleReport {
  std::size_t n = 0;              ///< vertices
  std::size_t m = 0;              ///< induced matching size
  double balance = 0;
  std::uint64_t bound = 0;        ///< 2^(n-m)
  MonoRectangle oracle;
  bool holds = false;             ///< oracle.size <= bound
  /// 2^n / (4e · oracle.size): length below which no AND-protocol exists.
  double protocol_lower_bound = 0;
  Matching matching;
};

/// Max monochromatic rectangle of IP_G under `part` against 2^(n-m).
RectangleReport check_rectanglesmall(const Graph &g, const Partition &part);

enum class GiForm : std::uint8_t { And, AndNotY, NotXAnd, Or };

const char *gi_form_name(GiForm f) noexcept;
bool eval_gi(GiForm f, bool x, bool y) noexcept;

struct GiTerm {
  Edge edge;
  bool px = false, py = false;   ///< parity of 1-neighbors of x (of y) besides y (x)
  GiForm form = GiForm::And;
};

/// For each matching edge xy, the function g(x, y) = parity of the edges at
/// x or y with both ends 1, under `a` on the vertices outside the matching:
/// x∧y, x∧¬y, ¬x∧y or x∨y by the parities (px, py). Each form is checked
/// against the direct count. Throws Error if `a` is too short or the
/// matching is not induced.
std::vector<GiTerm> gi_decomposition(const Graph &g, const Matching &mt, std::span<const std::uint8_t> a);
std::vector<GiTerm> gi_decomposition(const Graph &g, const Partition &part, std::span<const std::uint8_t> a);

} // namespace qobdd
