#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qobdd {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (QDIMACS, traces, OBDD blocks, strategy files).
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string &what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A node would violate the manager's variable order, or an object refers to
/// variables outside of it.
class OrderError : public Error {
public:
  using Error::Error;
};

/// A manager exceeded its configured node budget.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

/// Structural precondition violated (cross-manager refs, bad strategies, ...).
class StructureError : public Error {
public:
  using Error::Error;
};

} // namespace qobdd
