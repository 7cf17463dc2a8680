#pragma once

#include <stdexcept>
#include <string>

namespace remodel {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or mismatched predicate/action/type declarations.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Two models that do not share a vocabulary cannot be compared.
class IncomparableModelsError : public Error {
 public:
  using Error::Error;
};

// A mode assignment that breaks the pa-value rules (e.g. <+,+>).
class IllegalModeError : public Error {
 public:
  using Error::Error;
};

// Operation requires a concrete model but got one with unknown modes.
class AbstractModelError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : Error(msg + " (line " + std::to_string(line) + ", column " +
              std::to_string(col) + ")"),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

class UnsupportedFeatureError : public Error {
 public:
  explicit UnsupportedFeatureError(const std::string& keyword)
      : Error("unsupported feature: " + keyword), keyword_(keyword) {}
  const std::string& keyword() const { return keyword_; }

 private:
  std::string keyword_;
};

// References to undeclared objects, or atoms that leave the universe.
class GroundingError : public Error {
 public:
  using Error::Error;
};

// Ill-typed or ungrounded query; distinct from a zero-length response.
class QueryFormatError : public Error {
 public:
  using Error::Error;
};

class InfeasibleDriftError : public Error {
 public:
  using Error::Error;
};

// Observation traces that cannot all come from one deterministic model.
class InconsistentObservationsError : public Error {
 public:
  using Error::Error;
};

// Every candidate model eliminated; evidence contradicts the mode lattice.
class ContradictionError : public Error {
 public:
  using Error::Error;
};

class NoTraceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace remodel
