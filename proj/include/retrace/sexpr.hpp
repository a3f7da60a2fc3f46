#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "retrace/error.hpp"

namespace retrace {

// A parsed s-expression. Atoms keep whether they were written as "quoted"
// strings so printers can reproduce them.
struct SExpr {
  enum class Kind { kAtom, kList };

  Kind kind = Kind::kList;
  std::string atom;
  bool quoted = false;
  std::vector<SExpr> items;
  SourceLoc loc;

  bool is_atom() const { return kind == Kind::kAtom; }
  bool is_list() const { return kind == Kind::kList; }
  bool is_atom(std::string_view text) const {
    return is_atom() && !quoted && atom == text;
  }
  // True for a list whose first element is the unquoted atom `head`.
  bool has_head(std::string_view head) const {
    return is_list() && !items.empty() && items.front().is_atom(head);
  }

  static SExpr make_atom(std::string text, bool quoted = false) {
    SExpr e;
    e.kind = Kind::kAtom;
    e.atom = std::move(text);
    e.quoted = quoted;
    return e;
  }
  static SExpr make_list(std::vector<SExpr> items) {
    SExpr e;
    e.items = std::move(items);
    return e;
  }
};

// Reads every top-level form in `text`. `;` starts a comment to end of line.
std::vector<SExpr> read_sexprs(std::string_view text);

// Single-line rendering; atoms that need it are quoted.
std::string to_string(const SExpr& e);

// True if the atom must be quoted to survive a re-read.
bool needs_quotes(std::string_view atom);

}  // namespace retrace
