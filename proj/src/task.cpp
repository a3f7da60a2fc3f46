#include "retrace/task.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace retrace {
namespace {

struct Token {
  enum class Kind { kName, kString, kFString, kInt, kOp, kNewline, kIndent, kDedent, kEnd };

  Kind kind = Kind::kEnd;
  std::string text;
  SourceLoc loc;
};

class Lexer {
 public:
  Lexer(std::string_view src, SourceLoc origin) : src_(src), line_(origin.line), col_(origin.column) {}

  std::vector<Token> run(bool track_indent) {
    std::vector<Token> out;
    std::vector<int> indents{0};
    int depth = 0;
    bool line_start = track_indent;
    while (pos_ < src_.size()) {
      if (line_start && depth == 0) {
        int width = 0;
        SourceLoc start = here();
        while (pos_ < src_.size() && (peek() == ' ' || peek() == '\t')) {
          if (peek() == '\t') throw ParseError("tabs are not allowed for indentation", here());
          ++width;
          advance();
        }
        if (pos_ >= src_.size()) break;
        if (peek() == '\n' || peek() == '#' || peek() == '\r') {
          skip_to_eol();
          continue;
        }
        line_start = false;
        if (width > indents.back()) {
          indents.push_back(width);
          out.push_back({Token::Kind::kIndent, "", start});
        } else {
          while (width < indents.back()) {
            indents.pop_back();
            out.push_back({Token::Kind::kDedent, "", start});
          }
          if (width != indents.back())
            throw ParseError("indentation does not match any outer block", start);
        }
      }
      char c = peek();
      SourceLoc loc = here();
      if (c == '\n') {
        advance();
        if (depth == 0 && track_indent) {
          out.push_back({Token::Kind::kNewline, "", loc});
          line_start = true;
        }
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '"' || c == '\'') {
        out.push_back({Token::Kind::kString, read_string(), loc});
      } else if ((c == 'f' || c == 'F') && pos_ + 1 < src_.size() &&
                 (src_[pos_ + 1] == '"' || src_[pos_ + 1] == '\'')) {
        advance();
        out.push_back({Token::Kind::kFString, read_string(), loc});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
          num += peek();
          advance();
        }
        out.push_back({Token::Kind::kInt, num, loc});
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string name;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
          name += peek();
          advance();
        }
        out.push_back({Token::Kind::kName, name, loc});
      } else if (std::string_view("()[],=.:").find(c) != std::string_view::npos) {
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') {
          if (depth == 0) throw ParseError(std::string("unexpected '") + c + "'", loc);
          --depth;
        }
        out.push_back({Token::Kind::kOp, std::string(1, c), loc});
        advance();
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", loc);
      }
    }
    if (depth != 0) throw ParseError("unclosed bracket at end of file", here());
    if (track_indent) {
      if (!out.empty() && out.back().kind != Token::Kind::kNewline)
        out.push_back({Token::Kind::kNewline, "", here()});
      while (indents.size() > 1) {
        indents.pop_back();
        out.push_back({Token::Kind::kDedent, "", here()});
      }
    }
    out.push_back({Token::Kind::kEnd, "", here()});
    return out;
  }

 private:
  char peek() const { return src_[pos_]; }
  SourceLoc here() const { return {line_, col_}; }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_to_eol() {
    while (pos_ < src_.size() && peek() != '\n') advance();
    if (pos_ < src_.size()) advance();
  }
  std::string read_string() {
    SourceLoc start = here();
    char quote = peek();
    advance();
    std::string out;
    while (true) {
      if (pos_ >= src_.size() || peek() == '\n')
        throw ParseError("unterminated string", start);
      char c = peek();
      advance();
      if (c == quote) break;
      if (c == '\\') {
        if (pos_ >= src_.size()) throw ParseError("unterminated string", start);
        char e = peek();
        advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: out += e; break;
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_;
  int col_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<TaskStmt> program() {
    std::vector<TaskStmt> out;
    while (!at(Token::Kind::kEnd)) {
      if (at(Token::Kind::kIndent)) throw ParseError("unexpected indentation", cur().loc);
      out.push_back(statement());
    }
    return out;
  }

  TaskExpr standalone_expression() {
    TaskExpr e = expression();
    if (!at(Token::Kind::kEnd)) throw ParseError("unexpected text in f-string field", cur().loc);
    return e;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  bool at(Token::Kind k) const { return cur().kind == k; }
  bool at_op(char c) const { return at(Token::Kind::kOp) && cur().text[0] == c; }
  bool at_name(std::string_view n) const { return at(Token::Kind::kName) && cur().text == n; }
  Token take() { return toks_[i_++]; }
  void expect_op(char c) {
    if (!at_op(c)) throw ParseError(std::string("expected '") + c + "'" + found(), cur().loc);
    ++i_;
  }
  std::string expect_name(const char* what) {
    if (!at(Token::Kind::kName)) throw ParseError(std::string("expected ") + what + found(), cur().loc);
    return take().text;
  }
  void expect_newline() {
    if (!at(Token::Kind::kNewline)) throw ParseError("expected end of line" + found(), cur().loc);
    ++i_;
  }
  std::string found() const {
    switch (cur().kind) {
      case Token::Kind::kNewline: return ", found end of line";
      case Token::Kind::kEnd: return ", found end of file";
      case Token::Kind::kIndent: return ", found indentation";
      case Token::Kind::kDedent: return ", found dedent";
      default: return ", found '" + cur().text + "'";
    }
  }

  std::vector<TaskStmt> block() {
    expect_op(':');
    expect_newline();
    if (!at(Token::Kind::kIndent)) throw ParseError("expected an indented block", cur().loc);
    ++i_;
    std::vector<TaskStmt> body;
    while (!at(Token::Kind::kDedent) && !at(Token::Kind::kEnd)) body.push_back(statement());
    if (at(Token::Kind::kDedent)) ++i_;
    return body;
  }

  TaskStmt statement() {
    TaskStmt s;
    s.loc = cur().loc;
    if (at_name("for")) {
      ++i_;
      s.kind = TaskStmt::Kind::kFor;
      s.name = expect_name("loop variable");
      if (!at_name("in")) throw ParseError("expected 'in'" + found(), cur().loc);
      ++i_;
      if (!at_name("range")) throw ParseError("only 'for v in range(N)' loops are supported", cur().loc);
      ++i_;
      expect_op('(');
      s.value = expression();
      expect_op(')');
      s.body = block();
      return s;
    }
    if (at_name("def")) {
      ++i_;
      s.kind = TaskStmt::Kind::kDef;
      s.name = expect_name("function name");
      expect_op('(');
      while (!at_op(')')) {
        s.params.push_back(expect_name("parameter name"));
        if (!at_op(')')) expect_op(',');
      }
      expect_op(')');
      s.body = block();
      return s;
    }
    if (at_name("robot")) {
      TaskExpr call = robot_call(s);
      if (call.kind == TaskExpr::Kind::kPrompt) {
        s.kind = TaskStmt::Kind::kPrompt;
        s.value = std::move(call);
      }
      expect_newline();
      return s;
    }
    std::string name = expect_name("statement");
    if (at_op('=')) {
      ++i_;
      s.name = name;
      s.value = expression();
      s.kind = s.value.kind == TaskExpr::Kind::kPrompt ? TaskStmt::Kind::kPrompt
                                                       : TaskStmt::Kind::kAssign;
      expect_newline();
      return s;
    }
    if (at_op('(')) {
      s.kind = TaskStmt::Kind::kCall;
      s.name = name;
      s.args = arguments();
      expect_newline();
      return s;
    }
    throw ParseError("expected '=' or '(' after '" + name + "'", cur().loc);
  }

  std::vector<TaskArg> arguments() {
    expect_op('(');
    std::vector<TaskArg> args;
    while (!at_op(')')) {
      TaskArg a;
      if (at(Token::Kind::kName) && toks_[i_ + 1].kind == Token::Kind::kOp &&
          toks_[i_ + 1].text == "=") {
        a.keyword = take().text;
        ++i_;
      } else if (!args.empty() && !args.back().keyword.empty()) {
        throw ParseError("positional argument after keyword argument", cur().loc);
      }
      a.value = expression();
      args.push_back(std::move(a));
      if (!at_op(')')) expect_op(',');
    }
    expect_op(')');
    return args;
  }

  // robot.<name>(...). Fills `s` for actions; returns a kPrompt expression
  // for robot.prompt.
  TaskExpr robot_call(TaskStmt& s) {
    SourceLoc loc = cur().loc;
    ++i_;
    expect_op('.');
    std::string name = expect_name("robot action name");
    std::vector<TaskArg> args = arguments();
    if (name == "prompt") return make_prompt(std::move(args), loc);
    s.kind = TaskStmt::Kind::kAction;
    s.name = name;
    s.args = std::move(args);
    return {};
  }

  TaskExpr make_prompt(std::vector<TaskArg> args, SourceLoc loc) {
    TaskExpr p;
    p.kind = TaskExpr::Kind::kPrompt;
    p.loc = loc;
    std::optional<TaskExpr> text;
    std::optional<TaskExpr> buttons;
    for (auto& a : args) {
      if (a.keyword.empty() && !text) {
        text = std::move(a.value);
      } else if (a.keyword == "text" && !text) {
        text = std::move(a.value);
      } else if ((a.keyword == "buttons" || a.keyword.empty()) && !buttons) {
        buttons = std::move(a.value);
      } else {
        throw ParseError("robot.prompt takes (text, buttons=[...])", a.value.loc);
      }
    }
    if (!text) throw ParseError("robot.prompt needs a message", loc);
    if (!buttons) {
      buttons = TaskExpr{};
      buttons->kind = TaskExpr::Kind::kList;
      TaskExpr ok;
      ok.text = "OK";
      buttons->items.push_back(ok);
      buttons->loc = loc;
    }
    if (buttons->kind != TaskExpr::Kind::kList)
      throw ParseError("buttons must be a list literal", buttons->loc);
    if (buttons->items.empty()) throw ParseError("a prompt needs at least one button", buttons->loc);
    p.items.push_back(std::move(*text));
    p.items.push_back(std::move(*buttons));
    return p;
  }

  TaskExpr expression() {
    TaskExpr e = primary();
    while (at_op('[')) {
      TaskExpr idx;
      idx.kind = TaskExpr::Kind::kIndex;
      idx.loc = cur().loc;
      ++i_;
      idx.items.push_back(std::move(e));
      idx.items.push_back(expression());
      expect_op(']');
      e = std::move(idx);
    }
    return e;
  }

  TaskExpr primary() {
    TaskExpr e;
    e.loc = cur().loc;
    switch (cur().kind) {
      case Token::Kind::kString:
        e.kind = TaskExpr::Kind::kString;
        e.text = take().text;
        return e;
      case Token::Kind::kInt:
        e.kind = TaskExpr::Kind::kInt;
        try {
          e.value = std::stol(cur().text);
        } catch (const std::exception&) {
          throw ParseError("integer out of range", cur().loc);
        }
        ++i_;
        return e;
      case Token::Kind::kFString:
        return fstring(take());
      case Token::Kind::kName: {
        if (at_name("robot")) {
          TaskStmt dummy;
          TaskExpr call = robot_call(dummy);
          if (call.kind != TaskExpr::Kind::kPrompt)
            throw ParseError("robot actions return no value; only robot.prompt does", e.loc);
          return call;
        }
        e.kind = TaskExpr::Kind::kName;
        e.text = take().text;
        return e;
      }
      case Token::Kind::kOp:
        if (at_op('[')) {
          ++i_;
          e.kind = TaskExpr::Kind::kList;
          while (!at_op(']')) {
            e.items.push_back(expression());
            if (!at_op(']')) expect_op(',');
          }
          expect_op(']');
          return e;
        }
        break;
      default:
        break;
    }
    throw ParseError("expected an expression" + found(), cur().loc);
  }

  static TaskExpr fstring(const Token& tok) {
    TaskExpr e;
    e.kind = TaskExpr::Kind::kFString;
    e.loc = tok.loc;
    std::string piece;
    const std::string& s = tok.text;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '{' && i + 1 < s.size() && s[i + 1] == '{') {
        piece += '{';
        ++i;
      } else if (s[i] == '}' && i + 1 < s.size() && s[i + 1] == '}') {
        piece += '}';
        ++i;
      } else if (s[i] == '{') {
        size_t close = s.find('}', i);
        if (close == std::string::npos) throw ParseError("unclosed '{' in f-string", tok.loc);
        std::string inner = s.substr(i + 1, close - i - 1);
        auto toks = Lexer(inner, tok.loc).run(false);
        e.parts.push_back(piece);
        piece.clear();
        e.items.push_back(Parser(std::move(toks)).standalone_expression());
        i = close;
      } else if (s[i] == '}') {
        throw ParseError("single '}' in f-string", tok.loc);
      } else {
        piece += s[i];
      }
    }
    e.parts.push_back(piece);
    return e;
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Static checks

class Checker {
 public:
  void run(const std::vector<TaskStmt>& program) {
    std::set<std::string> scope;
    block(program, scope, true);
  }

 private:
  void expr(const TaskExpr& e, const std::set<std::string>& scope) {
    if (e.kind == TaskExpr::Kind::kName && !scope.count(e.text))
      throw ValidationError("variable '" + e.text + "' is used before it is bound", e.loc);
    for (const auto& item : e.items) expr(item, scope);
  }

  void block(const std::vector<TaskStmt>& body, std::set<std::string>& scope, bool top) {
    for (const auto& s : body) {
      switch (s.kind) {
        case TaskStmt::Kind::kAction:
          for (const auto& a : s.args) expr(a.value, scope);
          break;
        case TaskStmt::Kind::kAssign:
          expr(s.value, scope);
          scope.insert(s.name);
          if (top && s.value.kind == TaskExpr::Kind::kInt)
            constants_[s.name] = s.value.value;
          else
            constants_.erase(s.name);
          break;
        case TaskStmt::Kind::kPrompt:
          expr(s.value, scope);
          if (!s.name.empty()) {
            scope.insert(s.name);
            constants_.erase(s.name);
          }
          break;
        case TaskStmt::Kind::kFor: {
          bool constant = s.value.kind == TaskExpr::Kind::kInt ||
                          (s.value.kind == TaskExpr::Kind::kName && constants_.count(s.value.text));
          if (!constant)
            throw ValidationError(
                "loop bound must be an integer literal or a top-level integer constant",
                s.value.loc);
          scope.insert(s.name);
          constants_.erase(s.name);
          block(s.body, scope, false);
          break;
        }
        case TaskStmt::Kind::kDef:
          if (!top) throw ValidationError("functions must be defined at top level", s.loc);
          if (functions_.count(s.name))
            throw ValidationError("function '" + s.name + "' is defined twice", s.loc);
          functions_[s.name] = &s;
          break;
        case TaskStmt::Kind::kCall: {
          auto it = functions_.find(s.name);
          if (it == functions_.end())
            throw ValidationError("function '" + s.name + "' is not defined", s.loc);
          const TaskStmt& def = *it->second;
          if (s.args.size() != def.params.size())
            throw ValidationError("'" + s.name + "' takes " + std::to_string(def.params.size()) +
                                      " arguments",
                                  s.loc);
          for (const auto& a : s.args) {
            if (!a.keyword.empty())
              throw ValidationError("keyword arguments are not supported for functions", s.loc);
            expr(a.value, scope);
          }
          if (active_.count(s.name))
            throw ValidationError("recursive call to '" + s.name + "'", s.loc);
          active_.insert(s.name);
          std::set<std::string> inner = scope;
          for (const auto& p : def.params) inner.insert(p);
          auto saved = constants_;
          block(def.body, inner, false);
          constants_ = saved;
          active_.erase(s.name);
          break;
        }
      }
    }
  }

  std::map<std::string, long> constants_;
  std::map<std::string, const TaskStmt*> functions_;
  std::set<std::string> active_;
};

std::string quote_arg(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

TaskProgram parse_task(std::string_view text, const std::map<std::string, long>& overrides) {
  TaskProgram program;
  program.statements = Parser(Lexer(text, {1, 1}).run(true)).program();
  std::set<std::string> used;
  for (auto& s : program.statements) {
    if (s.kind == TaskStmt::Kind::kAssign && s.value.kind == TaskExpr::Kind::kInt) {
      auto it = overrides.find(s.name);
      if (it != overrides.end()) {
        s.value.value = it->second;
        used.insert(s.name);
      }
    }
  }
  for (const auto& [name, v] : overrides)
    if (!used.count(name))
      throw ValidationError("no top-level integer constant named '" + name + "'", {});
  Checker().run(program.statements);
  return program;
}

TaskProgram load_task(const std::string& path, const std::map<std::string, long>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_task(buf.str(), overrides);
}

void check_task(const TaskProgram& program, const RobotModel& model) {
  std::function<void(const std::vector<TaskStmt>&)> walk = [&](const std::vector<TaskStmt>& body) {
    for (const auto& s : body) {
      if (s.kind == TaskStmt::Kind::kAction) {
        auto it = model.actions.find(s.name);
        if (it == model.actions.end())
          throw ValidationError("the model has no action '" + s.name + "'", s.loc);
        const ActionSchema& a = it->second;
        size_t positional = 0;
        for (const auto& arg : s.args) {
          if (arg.keyword.empty()) {
            ++positional;
            continue;
          }
          bool known = std::any_of(a.parameters.begin(), a.parameters.end(),
                                   [&](const Parameter& p) { return p.name == arg.keyword; }) ||
                       std::any_of(a.implicit.begin(), a.implicit.end(),
                                   [&](const ImplicitParameter& p) { return p.name == arg.keyword; });
          if (!known)
            throw ValidationError(s.name + " has no parameter '" + arg.keyword + "'", arg.value.loc);
        }
        if (positional > a.parameters.size())
          throw ValidationError(s.name + " takes " + std::to_string(a.parameters.size()) +
                                    " positional arguments",
                                s.loc);
      }
      walk(s.body);
    }
  };
  walk(program.statements);
}

std::string ActionRequest::text() const {
  std::string out = name + "(";
  bool first = true;
  for (const auto& p : positional) {
    out += (first ? "" : ", ") + quote_arg(p);
    first = false;
  }
  for (const auto& [k, v] : named) {
    out += (first ? "" : ", ") + k + "=" + quote_arg(v);
    first = false;
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// Interpreter

TaskCursor::TaskCursor(const TaskProgram& program) {
  scopes_.emplace_back();
  Frame top;
  top.body = &program.statements;
  frames_.push_back(top);
}

bool TaskCursor::done() const {
  if (awaiting_) return false;
  TaskCursor copy = *this;
  return std::holds_alternative<EndOfProgram>(copy.next());
}

void TaskCursor::bind(const std::string& name, TaskValue v) { scopes_.back()[name] = std::move(v); }

TaskValue TaskCursor::eval(const TaskExpr& e) const {
  TaskValue v;
  switch (e.kind) {
    case TaskExpr::Kind::kString:
      v.text = e.text;
      return v;
    case TaskExpr::Kind::kInt:
      v.kind = TaskValue::Kind::kInt;
      v.value = e.value;
      return v;
    case TaskExpr::Kind::kFString:
      for (size_t i = 0; i < e.items.size(); ++i) v.text += e.parts[i] + eval_string(e.items[i]);
      v.text += e.parts.back();
      return v;
    case TaskExpr::Kind::kName: {
      // function bodies see their own locals and the globals
      auto hit = scopes_.back().find(e.text);
      if (hit != scopes_.back().end()) return hit->second;
      auto global = scopes_.front().find(e.text);
      if (global != scopes_.front().end()) return global->second;
      throw ValidationError("variable '" + e.text + "' is not bound", e.loc);
    }
    case TaskExpr::Kind::kList:
      v.kind = TaskValue::Kind::kList;
      for (const auto& item : e.items) v.items.push_back(eval(item));
      return v;
    case TaskExpr::Kind::kIndex: {
      TaskValue base = eval(e.items[0]);
      TaskValue idx = eval(e.items[1]);
      if (base.kind != TaskValue::Kind::kList) throw ValidationError("only lists can be indexed", e.loc);
      if (idx.kind != TaskValue::Kind::kInt) throw ValidationError("list index must be an integer", e.loc);
      long n = static_cast<long>(base.items.size());
      long i = idx.value < 0 ? idx.value + n : idx.value;
      if (i < 0 || i >= n)
        throw ValidationError("list index " + std::to_string(idx.value) + " out of range", e.loc);
      return base.items[i];
    }
    case TaskExpr::Kind::kPrompt:
      throw ValidationError("robot.prompt may only appear as a statement or assignment", e.loc);
  }
  return v;
}

std::string TaskCursor::eval_string(const TaskExpr& e) const {
  TaskValue v = eval(e);
  if (v.kind == TaskValue::Kind::kInt) return std::to_string(v.value);
  if (v.kind == TaskValue::Kind::kList) throw ValidationError("expected a string, got a list", e.loc);
  return v.text;
}

void TaskCursor::answer(const std::string& button) {
  if (!awaiting_) throw std::logic_error("no prompt is waiting for an answer");
  awaiting_ = false;
  if (!pending_target_.empty()) {
    TaskValue v;
    v.text = button;
    bind(pending_target_, v);
  }
  pending_target_.clear();
}

TaskStep TaskCursor::next() {
  if (awaiting_) throw std::logic_error("answer the pending prompt first");
  while (!frames_.empty()) {
    Frame& f = frames_.back();
    if (f.pc >= f.body->size()) {
      if (f.loop && f.next < f.end) {
        TaskValue i;
        i.kind = TaskValue::Kind::kInt;
        i.value = f.next++;
        f.pc = 0;
        bind(f.loop_var, i);
        continue;
      }
      if (f.call) scopes_.pop_back();
      frames_.pop_back();
      continue;
    }
    const TaskStmt& s = (*f.body)[f.pc++];
    switch (s.kind) {
      case TaskStmt::Kind::kAssign:
        bind(s.name, eval(s.value));
        break;
      case TaskStmt::Kind::kPrompt: {
        PromptRequest p;
        p.text = eval_string(s.value.items[0]);
        for (const auto& b : s.value.items[1].items) p.buttons.push_back(eval_string(b));
        p.loc = s.loc;
        awaiting_ = true;
        pending_target_ = s.name;
        return p;
      }
      case TaskStmt::Kind::kAction: {
        ActionRequest r;
        r.name = s.name;
        r.loc = s.loc;
        for (const auto& a : s.args) {
          std::string value = eval_string(a.value);
          if (a.keyword.empty())
            r.positional.push_back(value);
          else
            r.named[a.keyword] = value;
        }
        ++actions_;
        return r;
      }
      case TaskStmt::Kind::kFor: {
        TaskValue bound = eval(s.value);
        if (bound.kind != TaskValue::Kind::kInt)
          throw ValidationError("range() needs an integer", s.value.loc);
        if (bound.value <= 0) break;
        Frame loop;
        loop.body = &s.body;
        loop.loop = true;
        loop.loop_var = s.name;
        loop.next = 1;
        loop.end = bound.value;
        TaskValue zero;
        zero.kind = TaskValue::Kind::kInt;
        bind(s.name, zero);
        frames_.push_back(loop);
        break;
      }
      case TaskStmt::Kind::kDef:
        functions_[s.name] = &s;
        break;
      case TaskStmt::Kind::kCall: {
        const TaskStmt& def = *functions_.at(s.name);
        std::map<std::string, TaskValue> locals;
        for (size_t i = 0; i < def.params.size(); ++i) locals[def.params[i]] = eval(s.args[i].value);
        scopes_.push_back(std::move(locals));
        Frame call;
        call.body = &def.body;
        call.call = true;
        frames_.push_back(call);
        break;
      }
    }
  }
  return EndOfProgram{};
}

}  // namespace retrace
