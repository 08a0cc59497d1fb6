#pragma once

#include <stdexcept>
#include <string>

namespace detmat {

/// Malformed pattern or polynomial file contents.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// An operation was called outside the (m, n, r) regime it is defined for.
class RegimeError : public std::invalid_argument {
 public:
  explicit RegimeError(const std::string& what) : std::invalid_argument(what) {}
};

/// A precondition on a pattern argument failed (e.g. excise without a full border).
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Brute-force enumeration would exceed the configured search budget.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace detmat
