#include "retrace/sexpr.hpp"

#include <cctype>

namespace retrace {
namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read_one());
      skip_space();
    }
    return out;
  }

 private:
  SourceLoc here() const { return {line_, col_}; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read_one() {
    SourceLoc loc = here();
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", loc);
    if (c == '(') {
      advance();
      SExpr list;
      list.loc = loc;
      skip_space();
      while (true) {
        if (pos_ >= text_.size()) throw ParseError("unterminated list", loc);
        if (text_[pos_] == ')') {
          advance();
          return list;
        }
        list.items.push_back(read_one());
        skip_space();
      }
    }
    if (c == '"') {
      advance();
      std::string value;
      while (true) {
        if (pos_ >= text_.size()) throw ParseError("unterminated string", loc);
        char d = advance();
        if (d == '"') break;
        if (d == '\\') {
          if (pos_ >= text_.size())
            throw ParseError("unterminated string", loc);
          d = advance();
        }
        value.push_back(d);
      }
      SExpr atom = SExpr::make_atom(std::move(value), /*quoted=*/true);
      atom.loc = loc;
      return atom;
    }
    std::string value;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' ||
          d == ')' || d == ';' || d == '"')
        break;
      value.push_back(advance());
    }
    SExpr atom = SExpr::make_atom(std::move(value));
    atom.loc = loc;
    return atom;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) {
  return Reader(text).read_all();
}

bool needs_quotes(std::string_view atom) {
  if (atom.empty()) return true;
  for (char c : atom) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
        c == ';' || c == '"' || c == '\\')
      return true;
  }
  return false;
}

std::string to_string(const SExpr& e) {
  if (e.is_atom()) {
    if (!e.quoted && !needs_quotes(e.atom)) return e.atom;
    std::string out = "\"";
    for (char c : e.atom) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('"');
    return out;
  }
  std::string out = "(";
  for (size_t i = 0; i < e.items.size(); ++i) {
    if (i) out.push_back(' ');
    out += to_string(e.items[i]);
  }
  out.push_back(')');
  return out;
}

}  // namespace retrace
