#pragma once

#include <stdexcept>
#include <string>

namespace swathplan {

// Base for every error the library raises. Subclasses map one-to-one onto the
// failure modes callers are expected to distinguish (the CLI maps them onto
// exit codes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Paired-track layout impossible: range below three nadir half-gaps.
class InfeasiblePairing : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

// The P_d curve never reaches the admissibility threshold, or the effective
// range fell below the pairing limit during replanning.
class NoAdmissibleRange : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class EmptyData : public Error {
 public:
  using Error::Error;
};

class DegenerateComponent : public Error {
 public:
  using Error::Error;
};

class AreaMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed text input. line() is 1-based, 0 when not attributable to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace swathplan
