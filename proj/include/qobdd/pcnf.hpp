/// @file  pcnf.hpp
/// @brief Prenex CNF formulas and the QDIMACS format

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qobdd/obdd.hpp"

namespace qobdd {

enum class Quant : std::uint8_t { Exists, Forall };

/// DIMACS literal: +v or -v.
using Literal = int;

inline Var var_of(Literal l) noexcept { return static_cast<Var>(l < 0 ? -l : l); }

/// Literals sorted by variable, without duplicates.
using Clause = std::vector<Literal>;

struct PrefixEntry {
  Quant quant;
  Var var;

  friend bool operator==(const PrefixEntry &, const PrefixEntry &) = default;
};

/// A QBF in prenex conjunctive normal form.
///
/// Matrix variables missing from the given prefix are added as an outermost
/// existential block. Clauses are normalized (sorted, deduplicated) on
/// construction; tautological clauses are kept but reported by `audit`.
class Pcnf {
public:
  Pcnf() = default;
  /// Throws Error on variables out of range or quantified twice.
  Pcnf(std::size_t num_vars, std::vector<PrefixEntry> prefix, std::vector<Clause> clauses);

  std::size_t num_vars() const noexcept { return num_vars_; }
  std::span<const PrefixEntry> prefix() const noexcept { return prefix_; }
  std::span<const Clause> clauses() const noexcept { return clauses_; }

  bool is_quantified(Var v) const noexcept {
    return v < position_.size() && position_[v] != kUnquantified;
  }
  /// Index of `v` in the prefix. Throws Error if `v` is not quantified.
  std::size_t position(Var v) const;
  Quant quant(Var v) const { return prefix_[position(v)].quant; }
  bool is_universal(Var v) const { return quant(v) == Quant::Forall; }

  /// Number of maximal same-quantifier blocks.
  std::size_t block_count() const noexcept;
  std::vector<Var> prefix_vars() const;
  std::vector<Var> existentials() const;
  std::vector<Var> universals() const;

  /// Variable of `c` that is rightmost in the prefix; 0 for the empty clause.
  Var rightmost(std::span<const Literal> c) const;

  /// True iff every clause has a literal made true by `values`.
  bool satisfies(std::span<const std::uint8_t> values) const;

  /// Well-formedness audit; returns the first problem found.
  std::optional<std::string> audit() const;

private:
  static constexpr std::size_t kUnquantified = SIZE_MAX;

  std::size_t num_vars_ = 0;
  std::vector<PrefixEntry> prefix_;
  std::vector<Clause> clauses_;
  std::vector<std::size_t> position_;
};

/// Parses QDIMACS. Throws ParseError with the offending line number.
Pcnf parse_qdimacs(std::istream &in);
Pcnf parse_qdimacs(const std::string &text);

/// Canonical QDIMACS emission: header, one line per maximal quantifier
/// block, one line per clause.
void write_qdimacs(std::ostream &out, const Pcnf &f);
std::string to_qdimacs(const Pcnf &f);

} // namespace qobdd
