/// @file  proof.hpp
/// @brief OBDD derivation traces, the trace checker and QU-Resolution input

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "qobdd/error.hpp"
#include "qobdd/obdd.hpp"
#include "qobdd/pcnf.hpp"

namespace qobdd {

enum class Rule : std::uint8_t { Axiom, Conj, Proj, Entail, URed };

/// One derivation step. Line ids are 1-based and consecutive; every premise
/// refers to an earlier line.
struct ProofLine {
  Rule rule = Rule::Axiom;
  std::size_t clause = 0;               ///< Axiom: 1-based clause index
  std::vector<std::size_t> premises;    ///< Conj: j k; Proj, URed: j; Entail: j1..jk
  Var var = 0;                          ///< Proj, URed
  bool value = false;                   ///< URed constant
  std::string block;                    ///< Entail: claimed OBDD as an ObddBlock

  static ProofLine axiom(std::size_t clause) { return {Rule::Axiom, clause, {}, 0, false, {}}; }
  static ProofLine conj(std::size_t j, std::size_t k) { return {Rule::Conj, 0, {j, k}, 0, false, {}}; }
  static ProofLine proj(Var x, std::size_t j) { return {Rule::Proj, 0, {j}, x, false, {}}; }
  static ProofLine ured(Var u, bool c, std::size_t j) { return {Rule::URed, 0, {j}, u, c, {}}; }
  static ProofLine entail(std::vector<std::size_t> premises, std::string block) {
    return {Rule::Entail, 0, std::move(premises), 0, false, std::move(block)};
  }

  friend bool operator==(const ProofLine &, const ProofLine &) = default;
};

struct ProofTrace {
  std::size_t num_vars = 0;
  std::string formula_hash;   ///< hex SHA-256 of the canonical QDIMACS text
  std::vector<Var> order;     ///< π, outermost first
  std::vector<ProofLine> lines;

  friend bool operator==(const ProofTrace &, const ProofTrace &) = default;
};

/// Hex SHA-256 of `to_qdimacs(f)`.
std::string formula_hash(const Pcnf &f);

/// Raised by parse_trace when the input ends before the declared content.
class TruncatedInput : public ParseError {
public:
  using ParseError::ParseError;
};

/// Trace text format:
///   p qobdd-trace <nvars> <nlines>
///   h <sha256>
///   o <v1> ... <vn>
///   <id> A <clause> | C <j> <k> | P <x> <j> | U <u> <0|1> <j> | E <j1> .. <jk> 0
/// An E line is followed by its ObddBlock.
ProofTrace parse_trace(std::istream &in);
ProofTrace parse_trace(const std::string &text);
void write_trace(std::ostream &out, const ProofTrace &t);
std::string trace_to_string(const ProofTrace &t);

enum class Reason : std::uint8_t {
  None,
  OrderMismatch,
  AxiomMismatch,
  BadReference,
  UredNotRightmost,
  UredNotUniversal,
  EntailmentFailed,
  HashMismatch,
  BudgetExceeded,
  Malformed,
  Truncated,
};

/// Stable kebab-case code, e.g. "ured-not-rightmost".
const char *reason_code(Reason r) noexcept;

struct Verdict {
  bool accepted = false;
  std::size_t line = 0;   ///< offending line id, 0 for header problems
  Reason reason = Reason::None;
  std::string detail;

  explicit operator bool() const noexcept { return accepted; }
};

struct CheckOptions {
  std::size_t node_budget = Manager::kDefaultBudget;
};

/// Outcome of replaying a trace. On rejection `lines` holds the lines
/// replayed before the offending one.
struct Replay {
  Verdict verdict;
  std::shared_ptr<Manager> manager;
  std::vector<NodeRef> lines;

  bool refutation() const { return verdict.accepted && !lines.empty() && manager->is_zero(lines.back()); }
  /// Sum of the line sizes.
  std::size_t total_size() const;
  /// Distinct nodes reachable from all lines.
  std::size_t shared_size() const { return manager->shared_size(lines); }
};

/// Replays every line of `t` in a fresh manager over `t.order`. The first
/// m lines must be the axioms 1..m; Conj, Proj and URed results are
/// recomputed; an Entail line's block must be implied by its premises.
/// URed(u, c, j) requires u universal and no variable of L_j right of u.
Replay replay_trace(const Pcnf &f, const ProofTrace &t, const CheckOptions &opts = {});
Verdict check_trace(const Pcnf &f, const ProofTrace &t, const CheckOptions &opts = {});
/// Parses and checks; parse failures become malformed / truncated verdicts.
Verdict check_trace_text(const Pcnf &f, const std::string &text, const CheckOptions &opts = {});

/// Accepted and the last line is the 0-sink.
bool is_refutation(const Pcnf &f, const ProofTrace &t, const CheckOptions &opts = {});

// QU-Resolution

enum class QuRule : std::uint8_t { Axiom, Resolve, Reduce };

struct QuResLine {
  QuRule rule = QuRule::Axiom;
  Clause clause;           ///< Axiom: the clause
  std::size_t j = 0, k = 0; ///< Resolve: j, k; Reduce: j
  Literal lit = 0;         ///< Resolve: pivot variable (positive); Reduce: removed literal

  friend bool operator==(const QuResLine &, const QuResLine &) = default;
};

struct QuResProof {
  std::vector<QuResLine> lines;

  friend bool operator==(const QuResProof &, const QuResProof &) = default;
};

/// `<id> A <lits> 0`, `<id> R <j> <k> <pivot>`, `<id> U <j> <lit>`.
QuResProof parse_qures(std::istream &in);
QuResProof parse_qures(const std::string &text);
void write_qures(std::ostream &out, const QuResProof &p);
std::string qures_to_string(const QuResProof &p);

/// Clauses derived by each line of a valid proof. Throws StructureError on
/// the first invalid step: axioms not in f, pivot missing from j (positive)
/// or k (negative), tautological resolvents, reduced literal absent, not
/// universal, or followed by an existential of the clause.
std::vector<Clause> qures_clauses(const Pcnf &f, const QuResProof &p);

/// Translates a QU-Resolution refutation into a checked OBDD refutation over
/// π (prefix order when empty): each resolution becomes Conj then Proj of
/// the pivot; each reduction becomes URed with the constant falsifying the
/// literal, preceded by reductions of the universals right of it. Every line
/// represents a subclause of the corresponding QU-Res clause. Throws
/// StructureError on invalid input or if the input is not a refutation.
ProofTrace simulate_qures(const Pcnf &f, const QuResProof &p, std::vector<Var> order = {});

} // namespace qobdd
