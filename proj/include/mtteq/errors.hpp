#pragma once

#include <stdexcept>
#include <string>

namespace mtteq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Child count does not match a symbol's rank, or a fill list does not match
/// the number of holes in a pattern.
class ArityError : public Error {
 public:
  using Error::Error;
};

/// Evaluation reached a (state, input symbol) pair without a rule.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The initial state of a tree automaton accepts no tree.
class EmptyDomainError : public Error {
 public:
  using Error::Error;
};

/// Input does not satisfy the well-formedness conditions an operation needs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Syntax or resolution error in a textual specification.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        message_(msg),
        line_(line),
        column_(column) {}
  /// Same error located in a named file: "file:line:column: msg".
  ParseError(const std::string& file, const ParseError& e)
      : Error(file + ":" + e.what()), message_(e.message_), line_(e.line_), column_(e.column_) {}

  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

/// A broken internal invariant (bug or bound violation).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtteq
