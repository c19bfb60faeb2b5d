#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Invalid user input: malformed spec, violated preconditions, bad grids.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public SpecError {
 public:
  ParseError(int line, int column, const std::string& message)
      : SpecError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                  message),
        line_(line),
        column_(column),
        reason_(message) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  int line_;
  int column_;
  std::string reason_;
};

// A computation produced non-finite values or failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlslab
