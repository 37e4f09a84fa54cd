#pragma once

#include <stdexcept>
#include <string>

namespace epiwalk {

// User-facing input problems: bad parameters, malformed files, spec mismatches.
// The CLI maps these to exit code 1.
class ParamError : public std::runtime_error {
public:
  explicit ParamError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file. Carries the 1-based line of the offending byte.
class ParseError : public ParamError {
public:
  ParseError(const std::string& msg, long line)
      : ParamError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

// Broken internal invariant (e.g. walker conservation). The CLI maps these to
// exit code 2 so CI can tell engine bugs from user error.
class InvariantViolation : public std::logic_error {
public:
  explicit InvariantViolation(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace epiwalk
