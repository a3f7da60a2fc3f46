#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace retrace {

// A ground propositional literal such as at(mail room).
struct Literal {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

// A literal with polarity, as it appears in a conjunction.
struct GroundLiteral {
  Literal literal;
  bool positive = true;

  auto operator<=>(const GroundLiteral&) const = default;
  bool operator==(const GroundLiteral&) const = default;
};

// at(mail room); zero-arity literals render as in-elevator().
std::string to_string(const Literal& lit);
// Negative literals render as not at(mail room).
std::string to_string(const GroundLiteral& lit);

// Inverse of to_string(Literal), also accepting a leading "not ".
// Arguments are separated by commas; surrounding blanks are trimmed.
GroundLiteral parse_ground_literal(std::string_view text);

}  // namespace retrace
