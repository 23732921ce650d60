/// @file  solver.hpp
/// @brief Bucket-based symbolic quantifier elimination with trace emission

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qobdd/graph.hpp"
#include "qobdd/obdd.hpp"
#include "qobdd/pcnf.hpp"
#include "qobdd/proof.hpp"

namespace qobdd {

/// tower(a, 1) = a, tower(a, q + 1) = 2^tower(a, q); nullopt once it
/// exceeds 64 bits.
std::optional<std::uint64_t> tower(std::uint64_t a, std::size_t q);

struct SolveStats {
  std::vector<std::size_t> widths;   ///< complete width of every trace line
  std::size_t max_width = 0;
  std::size_t trace_nodes = 0;       ///< distinct nodes over all lines
  std::size_t trace_size = 0;        ///< sum of line sizes
  std::size_t trace_lines = 0;
  std::vector<Var> eliminations;     ///< eliminated variables, innermost first
  double wall_time_ms = 0;
};

struct SolveOptions {
  bool emit_trace = true;
  bool record_widths = true;
  /// Eliminate each existential block in reverse π order instead of
  /// reverse prefix order. Universal blocks always follow the prefix.
  bool reorder_existential_blocks = true;
  std::size_t node_budget = Manager::kDefaultBudget;
  /// Called after each bucket is processed with every OBDD still stored in
  /// a bucket.
  std::function<void(Var, Manager &, std::span<const NodeRef>)> observer;
};

struct SolveResult {
  bool value = false;
  /// Refutation when false, a derivation ending in 1 when true.
  std::optional<ProofTrace> trace;
  SolveStats stats;
  std::shared_ptr<Manager> manager;
  std::vector<NodeRef> lines;   ///< OBDD of every trace line
};

/// Eliminates variables from the innermost prefix position outwards (see
/// SolveOptions::reorder_existential_blocks). Bucket i holds OBDDs whose
/// rightmost variable is x_i; it is conjoined
/// smallest first, x_i is projected (∃) or reduced twice and conjoined (∀),
/// and the result goes to the bucket of its new rightmost variable. A 0
/// anywhere ends the run. `order` must be a permutation of the prefix
/// variables. Throws BudgetExceeded when the manager outgrows its budget.
SolveResult solve(const Pcnf &f, const VarOrder &order, const SolveOptions &opts = {});

/// Prefix position of the rightmost variable of `g`'s support; nullopt for
/// constants.
std::optional<std::size_t> bucket_of(const Pcnf &f, const Manager &mgr, NodeRef g);

/// Clause indices (0-based) per prefix position, by rightmost variable.
/// Tautological and empty clauses are left out.
std::vector<std::vector<std::size_t>> bucket_init(const Pcnf &f);

enum class OrderPolicy : std::uint8_t { Prefix, Pathwidth };

/// Order derived from `pd` restricted to the prefix variables; prefix
/// variables missing from `pd` follow in prefix order. The path is read in
/// whichever direction ranks the innermost prefix variable earlier (forward
/// on ties), so early eliminations happen near the top of the OBDDs.
VarOrder decomposition_order(const Pcnf &f, const PathDecomposition &pd);
/// Prefix order, or the order of a heuristic decomposition of the primal
/// graph.
VarOrder solver_order(const Pcnf &f, OrderPolicy policy);

enum class Family : std::uint8_t { QUParity, EqPrime };

Pcnf make_family(Family fam, std::size_t n);
PathDecomposition family_decomposition(Family fam, std::size_t n);

struct WidthPoint {
  std::size_t n = 0;
  bool value = false;
  std::size_t max_width = 0;
  std::size_t trace_nodes = 0;
  std::size_t trace_size = 0;
  double wall_time_ms = 0;
};

struct WidthReport {
  std::vector<WidthPoint> points;
  /// Max width is the same at every n.
  bool saturated() const;
};

/// Solves the family at each n under its decomposition order.
WidthReport width_probe(Family fam, std::span<const std::size_t> ns, std::size_t node_budget = Manager::kDefaultBudget);

} // namespace qobdd
