#pragma once

#include <stdexcept>
#include <string>

namespace fodef {

// Base class for all toolkit errors.  Thrown directly for validation
// failures that have no structured payload.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Text input could not be parsed (structure files, formulas, map files).
// The message carries a 1-based line or column position.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// A formula was evaluated against an assignment that leaves a free
// variable unbound, or with variables out of range.
class EvalError : public Error {
 public:
  explicit EvalError(const std::string& what) : Error(what) {}
};

// An exhaustive operation was asked to run past the configured soft
// limits while the caller requested strict enforcement.
class LimitError : public Error {
 public:
  explicit LimitError(const std::string& what) : Error(what) {}
};

}  // namespace fodef
