#include "retrace/literal.hpp"

#include <stdexcept>

namespace retrace {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_string(const Literal& lit) {
  std::string out = lit.predicate;
  out.push_back('(');
  for (size_t i = 0; i < lit.args.size(); ++i) {
    if (i) out += ", ";
    out += lit.args[i];
  }
  out.push_back(')');
  return out;
}

std::string to_string(const GroundLiteral& lit) {
  return lit.positive ? to_string(lit.literal) : "not " + to_string(lit.literal);
}

GroundLiteral parse_ground_literal(std::string_view text) {
  GroundLiteral out;
  text = trim(text);
  if (text.starts_with("not ")) {
    out.positive = false;
    text = trim(text.substr(4));
  }
  size_t open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')')
    throw std::invalid_argument("malformed literal: " + std::string(text));
  out.literal.predicate = std::string(trim(text.substr(0, open)));
  if (out.literal.predicate.empty())
    throw std::invalid_argument("literal without predicate: " + std::string(text));
  std::string_view inner = text.substr(open + 1, text.size() - open - 2);
  if (!trim(inner).empty()) {
    size_t start = 0;
    while (true) {
      size_t comma = inner.find(',', start);
      out.literal.args.emplace_back(
          trim(inner.substr(start, comma == std::string_view::npos
                                       ? std::string_view::npos
                                       : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

}  // namespace retrace
