#pragma once

#include <stdexcept>
#include <string>

namespace factspan {

// Base class for all toolkit errors. Subclasses distinguish the failure
// domain so callers (and the CLI) can map them to exit codes and messages.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input: bad JSON, bad CoNLL rows, unreadable tables.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse error: " + what) {}
};

// A domain invariant does not hold. The message names the offending field.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error("validation error: " + what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("i/o error: " + what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

// A metric has no defined value on the given inputs (e.g. balanced accuracy
// on single-class gold). Reported explicitly, never silently as zero.
class MetricUndefinedError : public Error {
 public:
  explicit MetricUndefinedError(const std::string& what)
      : Error("undefined metric: " + what) {}
};

// A weak-supervision example admits no labeling that satisfies its
// constraints (non-factual sentence whose every arc is source-supported).
class InfeasibleConstraintError : public Error {
 public:
  explicit InfeasibleConstraintError(const std::string& what)
      : Error("infeasible constraints: " + what) {}
};

}  // namespace factspan
