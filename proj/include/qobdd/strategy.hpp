/// @file  strategy.hpp
/// @brief Universal winning strategies as OBDD decision lists, and their
///        conversion to rectangle decision lists

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qobdd/obdd.hpp"
#include "qobdd/pcnf.hpp"
#include "qobdd/proof.hpp"

namespace qobdd {

struct DecisionEntry {
  NodeRef guard;
  bool value = false;

  friend bool operator==(const DecisionEntry &, const DecisionEntry &) = default;
};

/// First-match list of (guard, bit) pairs. The last guard is the 1-sink.
struct DecisionList {
  std::shared_ptr<Manager> manager;
  std::vector<DecisionEntry> entries;

  std::size_t length() const noexcept { return entries.size(); }
  /// Max complete width over the guards before the terminal entry (0 if none).
  std::size_t width() const;
  /// Reduced size of every guard.
  std::vector<std::size_t> guard_sizes() const;
  /// Complete width of every guard.
  std::vector<std::size_t> guard_widths() const;
};

/// One decision list per universal variable, all in one manager.
struct DecisionListFamily {
  std::shared_ptr<Manager> manager;
  std::map<Var, DecisionList> lists;

  /// First violation of: every universal of f has a list, each list ends in
  /// (1, ·), every guard depends only on variables left of its universal.
  std::optional<std::string> audit(const Pcnf &f) const;
};

/// Strategy of a checked refutation: every URed line L_i = L_j[u/c] appends
/// (¬L_i, c) to L_u in trace order; every list is closed by (1, 1).
/// Throws StructureError if `t` is not an accepted refutation of `f`.
DecisionListFamily extract(const Pcnf &f, const ProofTrace &t, const CheckOptions &opts = {});
/// Same, from an already replayed refutation (guards are added to its manager).
DecisionListFamily extract(const Pcnf &f, const ProofTrace &t, const Replay &replay);

/// Value of the first entry whose guard holds under `a`.
bool eval_list(const DecisionList &dl, std::span<const std::uint8_t> a);

/// Copy of `tau` with every universal of f set by its list, outermost first.
/// Throws StructureError if the family fails its audit.
Assignment respond(const Pcnf &f, const DecisionListFamily &fam, std::span<const std::uint8_t> tau);

struct VerifyOptions {
  std::size_t exhaustive_limit = 16;   ///< max existentials for exhaustive mode
  std::size_t samples = 100'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct WinningReport {
  bool winning = false;
  bool exhaustive = false;
  std::uint64_t checked = 0;
  /// Full assignment (strategy applied) that satisfies the matrix.
  std::optional<Assignment> counterexample;
};

/// Checks that the family falsifies the matrix against every existential
/// assignment (all of them when there are at most `exhaustive_limit`
/// existentials, otherwise `samples` random ones). The first counterexample
/// in enumeration order is reported.
WinningReport verify_winning(const Pcnf &f, const DecisionListFamily &fam, const VerifyOptions &opts = {});

/// Number of distinct universal response vectors over all assignments of
/// the existentials left of the last universal. Throws Error when there are
/// more than `limit` of them.
std::uint64_t strategy_range_size(const Pcnf &f, const DecisionListFamily &fam, std::size_t limit = 24);

/// Text format:
///   p qobdd-strategy
///   o <v1> ... <vn>
///   u <var> <s>          then s times:  entry <bit>  + ObddBlock
void write_strategy(std::ostream &out, const DecisionListFamily &fam);
std::string strategy_to_string(const DecisionListFamily &fam);
/// Reads into a fresh manager over the file's order.
DecisionListFamily parse_strategy(std::istream &in);
DecisionListFamily parse_strategy(const std::string &text);

// Rectangles

/// A set of assignments of `vars`. Row index bit i is the value of vars[i].
/// Sides of at most kExplicitSideLimit variables keep an explicit model
/// bitset; larger sides keep an OBDD in the owning manager.
struct RectangleHalf {
  static constexpr std::size_t kExplicitSideLimit = 20;

  std::vector<Var> vars;
  std::vector<std::uint64_t> bits;   ///< explicit models, if any
  std::optional<NodeRef> obdd;

  bool is_explicit() const noexcept { return !obdd.has_value(); }
  /// `side[i]` is the value of vars[i].
  bool contains(const Manager *mgr, std::span<const std::uint8_t> side) const;
  /// Number of models; explicit halves only.
  std::uint64_t count() const;
};

/// R1(X1) ∧ R2(X2).
struct Rectangle {
  RectangleHalf r1, r2;

  /// `a` is indexed by variable id.
  bool contains(const Manager *mgr, std::span<const std::uint8_t> a) const;
};

/// min(|X1|, |X2|) / |X|; 0 for an empty X.
double balance_factor(std::size_t x1, std::size_t x2);

/// Side values of `vars` read from a full assignment.
std::vector<std::uint8_t> project(std::span<const Var> vars, std::span<const std::uint8_t> a);

/// One rectangle per node of layer `cut` of `c` from which some assignment
/// is accepted: X1 is the first `cut` variables of c.order, R1 the X1
/// assignments reaching the node, R2 the X2 assignments it accepts. The
/// rectangles are disjoint and their union is the function of `c`. `mgr`
/// must own c's node functions. Throws OrderError if cut > |order|.
std::vector<Rectangle> obdd_to_rectangles(Manager &mgr, const CompleteObdd &c, std::size_t cut);

struct RectangleDecisionList {
  std::shared_ptr<Manager> manager;
  std::vector<Var> x1, x2;
  std::vector<std::pair<Rectangle, bool>> entries;

  std::size_t length() const noexcept { return entries.size(); }
  bool evaluate(std::span<const std::uint8_t> a) const;
};

/// Expands every non-terminal (L_i, c_i) of `dl` into the rectangles of
/// complete(L_i) at `cut`, each with value c_i; the terminal becomes the
/// full rectangle. Length is at most width(dl) * (length(dl) - 1) + 1.
RectangleDecisionList to_rectangle_list(const DecisionList &dl, std::size_t cut);

struct ProtocolRun {
  bool value = false;
  std::size_t rounds = 0;
};

/// Round i: player 1 announces a1 ∈ R1_i, player 2 announces a2 ∈ R2_i and
/// the referee broadcasts their conjunction; the first 1 ends the run with
/// value c_i. Throws Error if a1, a2 do not match the partition sizes.
ProtocolRun and_protocol_run(const RectangleDecisionList &rdl, std::span<const std::uint8_t> a1,
                             std::span<const std::uint8_t> a2);

} // namespace qobdd
