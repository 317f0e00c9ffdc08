#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jpq {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  Syntax,        // malformed query or pattern text
  Query,         // unbound/rebound variables, invalid composition, invalid construction
  Data,          // document loading and JSON errors
  Type,          // builtin applied off its signature
  Construction,  // runtime construction failure (duplicate output keys, shape mismatch)
  Internal,      // invariant breach
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax error carrying a 1-based line/column position.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t line, std::size_t column)
      : Error(ErrorKind::Syntax, std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace jpq
