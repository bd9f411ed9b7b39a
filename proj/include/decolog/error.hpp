#pragma once

#include <stdexcept>
#include <string>

namespace decolog {

// Malformed input text. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// A name that does not resolve in the ambient signature.
class NameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ill-typed or ill-decorated term. `path` locates the offending subterm as a
// sequence of argument indices from the root, e.g. "$.0.1".
class TypeError : public std::runtime_error {
 public:
  TypeError(std::string path, const std::string& message)
      : std::runtime_error("at " + path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// A rule application that the logic rejects (premise mismatch, side
// condition, decoration fragment).
class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace decolog
