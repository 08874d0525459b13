#ifndef SCOTTGROUP_ERRORS_HPP
#define SCOTTGROUP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scottgroup {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. Line and column are 1-based; line 0 means the
/// input was a single string rather than a file.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(format(what, line, column)), line(line), column(column) {}

  std::size_t line;
  std::size_t column;

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    std::string where = line == 0 ? "column " + std::to_string(column)
                                  : std::to_string(line) + ":" + std::to_string(column);
    return "parse error at " + where + ": " + what;
  }
};

/// A documented precondition of an operation does not hold.
struct PreconditionError : Error {
  using Error::Error;
};

/// A membership oracle could not decide at its configured bounds.
struct OracleInconclusive : Error {
  using Error::Error;
};

/// An internal invariant failed. Always a bug.
struct InvariantViolation : Error {
  using Error::Error;
};

struct SignatureMismatch : Error {
  using Error::Error;
};

}  // namespace scottgroup

#endif  // SCOTTGROUP_ERRORS_HPP
