#pragma once

#include <stdexcept>
#include <string>

namespace retrace {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

// Raised for malformed model/task/scenario text. Carries the 1-based position
// of the offending token when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, SourceLoc loc)
      : std::runtime_error(format(what, loc)), loc_(loc) {}

  SourceLoc loc() const { return loc_; }

 private:
  static std::string format(const std::string& what, SourceLoc loc) {
    if (loc.line <= 0) return what;
    return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " +
           what;
  }
  SourceLoc loc_;
};

// Well-formed text that violates a model or program invariant.
class ValidationError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Grounding an action request against a model and a world snapshot failed.
class GroundingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Posterior query conditioned on evidence of probability zero.
class InconsistentEvidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace retrace
