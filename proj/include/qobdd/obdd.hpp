/// @file  obdd.hpp
/// @brief Canonical ordered binary decision diagrams (no complement edges)

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qobdd/error.hpp"

namespace qobdd {

class LineReader;

/// Variable id. Ids are 1-based and match the QDIMACS numbering; 0 is unused.
using Var = std::uint32_t;

/// Truth values indexed by variable id (entry 0 unused). Entries are 0 or 1.
using Assignment = std::vector<std::uint8_t>;

/// A fixed total order on a set of variables.
class VarOrder {
public:
  VarOrder() = default;
  /// Throws OrderError on duplicates or the id 0.
  explicit VarOrder(std::vector<Var> vars);

  std::span<const Var> vars() const noexcept { return vars_; }
  std::size_t size() const noexcept { return vars_.size(); }
  bool contains(Var v) const noexcept {
    return v < rank_.size() && rank_[v] != kAbsent;
  }
  /// Position of `v` in the order. Throws OrderError if absent.
  std::uint32_t rank(Var v) const;
  Var at(std::size_t rank) const { return vars_.at(rank); }
  /// Largest variable id in the order (0 if empty).
  Var max_var() const noexcept {
    return rank_.empty() ? 0 : static_cast<Var>(rank_.size() - 1);
  }

  friend bool operator==(const VarOrder &a, const VarOrder &b) {
    return a.vars_ == b.vars_;
  }

private:
  static constexpr std::uint32_t kAbsent = UINT32_MAX;
  std::vector<Var> vars_;
  std::vector<std::uint32_t> rank_;
};

/// Handle to a node of one Manager. Only meaningful inside that manager.
struct NodeRef {
  std::uint32_t manager = 0;
  std::uint32_t index = 0;

  friend auto operator<=>(const NodeRef &, const NodeRef &) = default;
};

/// Binary Boolean operators, encoded by their truth table: bit `2a+b` holds
/// `op(a, b)`. Every value 0..15 is a valid operator.
enum class Op : std::uint8_t {
  False = 0x0,
  Nor = 0x1,
  Xor = 0x6,
  Nand = 0x7,
  And = 0x8,
  Xnor = 0x9,
  Implies = 0xB,
  Or = 0xE,
  True = 0xF,
};

constexpr bool eval_op(Op op, bool a, bool b) noexcept {
  return (static_cast<unsigned>(op) >> ((a ? 2u : 0u) | (b ? 1u : 0u))) & 1u;
}

/// Complete OBDD: every root-to-sink path tests every variable of the order.
///
/// Layer `i < order.size()` holds the nodes testing `order.at(i)`; the last
/// layer holds the reachable sinks. Children are indices into the next layer.
struct CompleteObdd {
  struct Node {
    /// Subfunction computed at this node (a node of the source manager).
    NodeRef function;
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;
  };

  std::vector<Var> order;
  std::vector<std::vector<Node>> layers;
  /// Sink value of each node of the last layer.
  std::vector<bool> sink_values;

  /// Maximum number of nodes in a variable layer.
  std::size_t width() const noexcept;
  std::size_t size() const noexcept;
  bool evaluate(std::span<const std::uint8_t> values) const;
};

/// Hash-consed store of reduced OBDDs under one variable order.
///
/// Nodes are never freed. Every constructor of nodes goes through `make`,
/// which keeps the store reduced and canonical: equal functions built in the
/// same manager always get equal NodeRefs.
class Manager {
public:
  static constexpr std::size_t kDefaultBudget = 10'000'000;

  explicit Manager(VarOrder order, std::size_t node_budget = kDefaultBudget);
  Manager(const Manager &) = delete;
  Manager &operator=(const Manager &) = delete;
  Manager(Manager &&) = default;
  Manager &operator=(Manager &&) = default;

  const VarOrder &order() const noexcept { return order_; }
  std::uint32_t id() const noexcept { return id_; }

  NodeRef zero() const noexcept { return {id_, 0}; }
  NodeRef one() const noexcept { return {id_, 1}; }
  NodeRef constant(bool b) const noexcept { return b ? one() : zero(); }
  NodeRef literal(Var v, bool positive = true);
  /// OBDD of a clause given as DIMACS literals. Tautologies yield one().
  NodeRef clause(std::span<const int> literals);

  /// Unique node testing `v` with the given children. Returns `lo` when the
  /// test is redundant. Throws OrderError if `v` does not precede the
  /// children's variables.
  NodeRef make(Var v, NodeRef lo, NodeRef hi);

  NodeRef apply(Op op, NodeRef f, NodeRef g);
  NodeRef conj(NodeRef f, NodeRef g) { return apply(Op::And, f, g); }
  NodeRef disj(NodeRef f, NodeRef g) { return apply(Op::Or, f, g); }
  NodeRef negate(NodeRef f);
  NodeRef restrict(NodeRef f, Var x, bool value);
  NodeRef exists(NodeRef f, Var x);
  NodeRef forall(NodeRef f, Var x);

  bool is_const(NodeRef f) const { return check(f) < 2; }
  bool is_zero(NodeRef f) const { return check(f) == 0; }
  bool is_one(NodeRef f) const { return check(f) == 1; }
  /// Variable tested at `f`; 0 for sinks.
  Var var(NodeRef f) const { return nodes_[check(f)].var; }
  NodeRef lo(NodeRef f) const { return {id_, nodes_[check(f)].lo}; }
  NodeRef hi(NodeRef f) const { return {id_, nodes_[check(f)].hi}; }
  /// Rank of the tested variable; `order().size()` for sinks.
  std::uint32_t level(NodeRef f) const { return level_of(check(f)); }

  /// Number of nodes reachable from `f`, sinks included.
  std::size_t size(NodeRef f) const;
  /// Number of distinct nodes reachable from any of `roots`.
  std::size_t shared_size(std::span<const NodeRef> roots) const;
  /// Variables `f` depends on, in order.
  std::vector<Var> support(NodeRef f) const;
  bool depends_on(NodeRef f, Var x) const;
  bool evaluate(NodeRef f, std::span<const std::uint8_t> values) const;

  CompleteObdd complete(NodeRef f) const;
  /// Width of `complete(f)` without materializing it.
  std::size_t complete_width(NodeRef f) const;

  /// Number of stored nodes, sinks included.
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t node_budget() const noexcept { return budget_; }
  void set_node_budget(std::size_t budget) noexcept { budget_ = budget; }
  void clear_caches();

  /// Structural audit of the whole store. Returns a description of the first
  /// violated invariant, if any.
  std::optional<std::string> audit() const;

private:
  struct Node {
    Var var;
    std::uint32_t lo;
    std::uint32_t hi;
  };
  struct TripleHash {
    std::size_t operator()(const Node &n) const noexcept;
  };
  struct TripleEq {
    bool operator()(const Node &a, const Node &b) const noexcept {
      return a.var == b.var && a.lo == b.lo && a.hi == b.hi;
    }
  };

  std::uint32_t check(NodeRef f) const;
  std::uint32_t level_of(std::uint32_t index) const {
    return index < 2 ? static_cast<std::uint32_t>(order_.size())
                     : order_.rank(nodes_[index].var);
  }
  std::uint32_t make_index(Var v, std::uint32_t lo, std::uint32_t hi);
  std::uint32_t apply_rec(Op op, std::uint32_t f, std::uint32_t g);
  std::uint32_t negate_rec(std::uint32_t f);
  std::uint32_t restrict_rec(std::uint32_t f, std::uint32_t rank, bool value,
                             std::unordered_map<std::uint32_t, std::uint32_t> &memo);

  VarOrder order_;
  std::uint32_t id_;
  std::size_t budget_;
  std::vector<Node> nodes_;
  std::unordered_map<Node, std::uint32_t, TripleHash, TripleEq> unique_;
  std::array<std::unordered_map<std::uint64_t, std::uint32_t>, 16> apply_cache_;
  std::unordered_map<std::uint32_t, std::uint32_t> negate_cache_;
};

/// Writes `f` as an ObddBlock:
///
///     obdd <k>
///     <idx> <var|T0|T1> <lo-idx|-> <hi-idx|->
///
/// Indices are 0-based and topologically ordered, children first; the root
/// is the last line.
void write_block(std::ostream &out, const Manager &mgr, NodeRef f);
std::string block_to_string(const Manager &mgr, NodeRef f);

/// Reads one ObddBlock into `mgr`. Throws ParseError on malformed input and
/// OrderError when the block does not respect `mgr`'s order.
NodeRef read_block(LineReader &in, Manager &mgr);
NodeRef block_from_string(const std::string &text, Manager &mgr);

} // namespace qobdd
