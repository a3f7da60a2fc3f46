#include "retrace/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "retrace/sexpr.hpp"

namespace retrace {
namespace {

[[noreturn]] void fail(const std::string& what, SourceLoc loc) {
  throw ParseError(what, loc);
}

[[noreturn]] void invalid(const std::string& what, SourceLoc loc = {}) {
  throw ValidationError(what, loc);
}

const SExpr& expect_list(const SExpr& e, const char* what) {
  if (!e.is_list()) fail(std::string("expected ") + what, e.loc);
  return e;
}

const std::string& expect_atom(const SExpr& e, const char* what) {
  if (!e.is_atom()) fail(std::string("expected ") + what, e.loc);
  return e.atom;
}

bool is_variable(const SExpr& e) {
  return e.is_atom() && !e.quoted && e.atom.size() > 1 && e.atom[0] == '?';
}

// ?a ?b - type ?c - other
std::vector<Parameter> parse_typed_variables(const SExpr& list) {
  std::vector<Parameter> out;
  std::vector<std::string> pending;
  const auto& items = expect_list(list, "typed variable list").items;
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].is_atom("-")) {
      if (i + 1 >= items.size() || pending.empty())
        fail("dangling '-' in typed list", items[i].loc);
      const std::string& type = expect_atom(items[i + 1], "type name");
      for (auto& name : pending) out.push_back({name, type});
      pending.clear();
      ++i;
      continue;
    }
    if (!is_variable(items[i])) fail("expected ?variable", items[i].loc);
    pending.push_back(items[i].atom.substr(1));
  }
  if (!pending.empty()) fail("variables without a type", list.loc);
  return out;
}

Term parse_term(const SExpr& e) {
  Term t;
  if (e.is_atom()) {
    if (is_variable(e)) {
      t.kind = Term::Kind::kVariable;
      t.name = e.atom.substr(1);
    } else {
      t.kind = Term::Kind::kConstant;
      t.name = e.atom;
    }
    return t;
  }
  if (e.items.size() != 2 || !e.items[0].is_atom() || e.items[0].quoted)
    fail("function application must be (function term)", e.loc);
  t.kind = Term::Kind::kApply;
  t.name = e.items[0].atom;
  t.args.push_back(parse_term(e.items[1]));
  return t;
}

LiteralTemplate parse_atom_template(const SExpr& e) {
  if (!e.is_list() || e.items.empty() || !e.items[0].is_atom() ||
      e.items[0].quoted)
    fail("expected literal (predicate term...)", e.loc);
  LiteralTemplate lit;
  lit.predicate = e.items[0].atom;
  lit.loc = e.loc;
  for (size_t i = 1; i < e.items.size(); ++i)
    lit.args.push_back(parse_term(e.items[i]));
  return lit;
}

LiteralTemplate parse_literal_template(const SExpr& e) {
  if (e.has_head("not")) {
    if (e.items.size() != 2) fail("(not literal) takes one literal", e.loc);
    LiteralTemplate lit = parse_atom_template(e.items[1]);
    lit.positive = false;
    lit.loc = e.loc;
    return lit;
  }
  return parse_atom_template(e);
}

// (and l1 l2 ...) | literal | (and)
std::vector<LiteralTemplate> parse_conjunction(const SExpr& e) {
  std::vector<LiteralTemplate> out;
  if (e.has_head("and")) {
    for (size_t i = 1; i < e.items.size(); ++i)
      out.push_back(parse_literal_template(e.items[i]));
    return out;
  }
  if (e.has_head("or") || e.has_head("forall") || e.has_head("exists") ||
      e.has_head("when") || e.has_head("imply"))
    fail("only conjunctions of literals are supported here", e.loc);
  out.push_back(parse_literal_template(e));
  return out;
}

Expr parse_expr(const SExpr& e, const std::set<std::string>& var_names) {
  Expr x;
  x.loc = e.loc;
  if (e.is_atom()) {
    if (e.is_atom("true")) {
      x.kind = Expr::Kind::kTrue;
    } else if (e.is_atom("false")) {
      x.kind = Expr::Kind::kFalse;
    } else if (!e.quoted && var_names.count(e.atom)) {
      x.kind = Expr::Kind::kActionVar;
      x.name = e.atom;
    } else {
      fail("unknown action variable '" + e.atom + "'", e.loc);
    }
    return x;
  }
  if (e.items.empty()) fail("empty expression", e.loc);
  auto operands = [&](size_t min) {
    if (e.items.size() - 1 < min) fail("too few operands", e.loc);
    for (size_t i = 1; i < e.items.size(); ++i)
      x.operands.push_back(parse_expr(e.items[i], var_names));
  };
  if (e.has_head("not")) {
    if (e.items.size() != 2) fail("(not e) takes one operand", e.loc);
    x.kind = Expr::Kind::kNot;
    operands(1);
  } else if (e.has_head("and")) {
    x.kind = Expr::Kind::kAnd;
    operands(1);
  } else if (e.has_head("or")) {
    x.kind = Expr::Kind::kOr;
    operands(1);
  } else if (e.has_head("new")) {
    if (e.items.size() != 2) fail("(new literal) takes one literal", e.loc);
    x.kind = Expr::Kind::kNew;
    x.literal = parse_atom_template(e.items[1]);
  } else if (e.has_head("bound")) {
    if (e.items.size() != 2 || !is_variable(e.items[1]))
      fail("(bound ?var) takes one variable", e.loc);
    x.kind = Expr::Kind::kBound;
    x.name = e.items[1].atom.substr(1);
  } else if (e.has_head("=")) {
    if (e.items.size() != 3) fail("(= a b) takes two terms", e.loc);
    x.kind = Expr::Kind::kEqual;
    x.terms.push_back(parse_term(e.items[1]));
    x.terms.push_back(parse_term(e.items[2]));
  } else {
    x.kind = Expr::Kind::kPrior;
    x.literal = parse_atom_template(e);
  }
  return x;
}

Statement parse_statement(const SExpr& e, const std::set<std::string>& vars) {
  Statement s;
  s.loc = e.loc;
  if (e.has_head(":=")) {
    if (e.items.size() != 3) fail("(:= literal expr) takes two operands", e.loc);
    s.kind = Statement::Kind::kAssign;
    s.target = parse_atom_template(e.items[1]);
    s.value = parse_expr(e.items[2], vars);
    return s;
  }
  if (e.has_head("when")) {
    if (e.items.size() < 3) fail("(when cond statement...) needs a body", e.loc);
    s.kind = Statement::Kind::kWhen;
    s.condition = parse_expr(e.items[1], vars);
    for (size_t i = 2; i < e.items.size(); ++i)
      s.body.push_back(parse_statement(e.items[i], vars));
    return s;
  }
  if (e.has_head("forall")) {
    if (e.items.size() < 3)
      fail("(forall (?v - type) statement...) needs a body", e.loc);
    s.kind = Statement::Kind::kForall;
    s.bound = parse_typed_variables(e.items[1]);
    for (size_t i = 2; i < e.items.size(); ++i)
      s.body.push_back(parse_statement(e.items[i], vars));
    return s;
  }
  fail("expected (:= ...), (when ...) or (forall ...)", e.loc);
}

BeliefUpdateProgram parse_belief_update(const SExpr& e) {
  BeliefUpdateProgram program;
  const auto& items = expect_list(e, "belief-update block").items;
  std::set<std::string> var_names;
  for (const auto& item : items) {
    if (item.has_head("success") || item.has_head("aux")) {
      if (item.items.size() != 3)
        fail("(success name alpha) takes two atoms", item.loc);
      ActionVarDecl v;
      v.success = item.has_head("success");
      v.name = expect_atom(item.items[1], "variable name");
      v.alpha = expect_atom(item.items[2], "parameter name");
      if (!var_names.insert(v.name).second)
        fail("duplicate action variable '" + v.name + "'", item.loc);
      program.vars.push_back(v);
    }
  }
  for (const auto& item : items) {
    if (item.has_head("success") || item.has_head("aux")) continue;
    program.statements.push_back(parse_statement(item, var_names));
  }
  return program;
}

ActionSchema parse_action(const SExpr& e) {
  ActionSchema a;
  a.loc = e.loc;
  if (e.items.size() < 2) fail("(:action name ...) needs a name", e.loc);
  a.name = expect_atom(e.items[1], "action name");
  for (size_t i = 2; i < e.items.size(); i += 2) {
    const SExpr& key = e.items[i];
    if (!key.is_atom() || key.atom.empty() || key.atom[0] != ':')
      fail("expected :keyword", key.loc);
    if (i + 1 >= e.items.size()) fail("missing value for " + key.atom, key.loc);
    const SExpr& value = e.items[i + 1];
    if (key.atom == ":parameters") {
      a.parameters = parse_typed_variables(value);
    } else if (key.atom == ":implicit") {
      for (const auto& item : expect_list(value, "implicit list").items) {
        const auto& parts = expect_list(item, "(?v - type family)").items;
        if (parts.size() < 4 || !is_variable(parts[0]) || !parts[1].is_atom("-"))
          fail("expected (?var - type family [:optional])", item.loc);
        ImplicitParameter p;
        p.name = parts[0].atom.substr(1);
        p.type = expect_atom(parts[2], "type name");
        p.family = expect_atom(parts[3], "predicate family");
        if (parts.size() == 5) {
          if (!parts[4].is_atom(":optional"))
            fail("expected :optional", parts[4].loc);
          p.optional = true;
        } else if (parts.size() > 5) {
          fail("too many items in implicit parameter", item.loc);
        }
        a.implicit.push_back(p);
      }
    } else if (key.atom == ":precondition") {
      a.precondition = parse_conjunction(value);
    } else if (key.atom == ":postcondition" || key.atom == ":effect") {
      a.postcondition = parse_conjunction(value);
    } else if (key.atom == ":belief-update") {
      a.belief_update = parse_belief_update(value);
    } else if (key.atom == ":failure-evidence") {
      for (const auto& item : expect_list(value, "failure-evidence list").items) {
        const auto& parts = expect_list(item, "(label conjunction)").items;
        if (parts.size() != 2) fail("expected (label conjunction)", item.loc);
        FailureEvidenceEntry entry;
        entry.label = expect_atom(parts[0], "label");
        entry.literals = parse_conjunction(parts[1]);
        a.failure_evidence.push_back(std::move(entry));
      }
    } else {
      fail("unknown action keyword " + key.atom, key.loc);
    }
  }
  return a;
}

double parse_probability(const SExpr& e) {
  const std::string& text = expect_atom(e, "number");
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail("expected a number, got '" + text + "'", e.loc);
  }
}

RobotModel parse_define(const SExpr& root) {
  if (!root.has_head("define")) fail("expected (define (domain name) ...)", root.loc);
  RobotModel m;
  if (root.items.size() < 2 || !root.items[1].has_head("domain") ||
      root.items[1].items.size() != 2)
    fail("expected (domain name)", root.loc);
  m.name = expect_atom(root.items[1].items[1], "domain name");
  for (size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = root.items[i];
    if (section.has_head(":types")) {
      for (size_t j = 1; j < section.items.size(); ++j)
        m.types.insert(expect_atom(section.items[j], "type name"));
    } else if (section.has_head(":objects")) {
      std::vector<std::string> pending;
      for (size_t j = 1; j < section.items.size(); ++j) {
        const SExpr& item = section.items[j];
        if (item.is_atom("-")) {
          if (j + 1 >= section.items.size() || pending.empty())
            fail("dangling '-' in :objects", item.loc);
          const std::string& type = expect_atom(section.items[++j], "type name");
          for (auto& name : pending) {
            if (!m.objects.emplace(name, type).second)
              invalid("duplicate object '" + name + "'", item.loc);
          }
          pending.clear();
        } else {
          pending.push_back(expect_atom(item, "object name"));
        }
      }
      if (!pending.empty()) fail("objects without a type", section.loc);
    } else if (section.has_head(":predicates")) {
      for (size_t j = 1; j < section.items.size(); ++j) {
        const SExpr& decl = expect_list(section.items[j], "predicate declaration");
        if (decl.items.empty()) fail("empty predicate declaration", decl.loc);
        PredicateDecl p;
        p.name = expect_atom(decl.items[0], "predicate name");
        SExpr rest = SExpr::make_list(
            std::vector<SExpr>(decl.items.begin() + 1, decl.items.end()));
        rest.loc = decl.loc;
        for (auto& v : parse_typed_variables(rest)) p.arg_types.push_back(v.type);
        if (!m.predicates.emplace(p.name, p).second)
          invalid("duplicate predicate '" + p.name + "'", decl.loc);
      }
    } else if (section.has_head(":functions")) {
      size_t j = 1;
      while (j < section.items.size()) {
        if (j + 3 >= section.items.size())
          fail("expected (f ?x - type) - result ((arg value)...)", section.items[j].loc);
        const SExpr& decl = expect_list(section.items[j], "function declaration");
        if (!section.items[j + 1].is_atom("-"))
          fail("expected '-' after function declaration", section.items[j + 1].loc);
        FunctionDecl f;
        if (decl.items.size() != 4 || !decl.items[2].is_atom("-"))
          fail("functions take one typed argument: (f ?x - type)", decl.loc);
        f.name = expect_atom(decl.items[0], "function name");
        f.argument_type = expect_atom(decl.items[3], "type name");
        f.result_type = expect_atom(section.items[j + 2], "type name");
        const SExpr& table = expect_list(section.items[j + 3], "function table");
        for (const auto& row : table.items) {
          const auto& pair = expect_list(row, "(argument value)").items;
          if (pair.size() != 2) fail("expected (argument value)", row.loc);
          if (!f.mapping
                   .emplace(expect_atom(pair[0], "object"),
                            expect_atom(pair[1], "object"))
                   .second)
            invalid("function '" + f.name + "' maps an object twice", row.loc);
        }
        m.functions.push_back(std::move(f));
        j += 4;
      }
    } else if (section.has_head(":params")) {
      for (size_t j = 1; j < section.items.size(); ++j) {
        const auto& pair = expect_list(section.items[j], "(name value)").items;
        if (pair.size() != 2) fail("expected (name value)", section.items[j].loc);
        const std::string& name = expect_atom(pair[0], "parameter name");
        double v = parse_probability(pair[1]);
        if (!(v >= 0.0 && v <= 1.0))
          invalid("parameter '" + name + "' = " + pair[1].atom +
                      " is outside [0, 1]",
                  pair[1].loc);
        if (!m.params.emplace(name, v).second)
          invalid("duplicate parameter '" + name + "'", section.items[j].loc);
      }
    } else if (section.has_head(":action")) {
      ActionSchema a = parse_action(section);
      if (m.actions.count(a.name))
        invalid("duplicate action '" + a.name + "'", section.loc);
      m.actions.emplace(a.name, std::move(a));
    } else if (section.has_head(":requirements")) {
      // accepted for PDDL familiarity, ignored
    } else {
      fail("unknown section " + to_string(section).substr(0, 40), section.loc);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Validation

class Validator {
 public:
  explicit Validator(const RobotModel& m) : m_(m) {}

  void run() {
    for (const auto& [name, type] : m_.objects) require_type(type, {});
    for (const auto& [name, p] : m_.predicates) {
      for (const auto& t : p.arg_types) require_type(t, {});
      arity_[name] = p.arg_types.size();
    }
    for (const auto& [name, v] : m_.params) {
      if (!(v >= 0.0 && v <= 1.0))
        invalid("parameter '" + name + "' is outside [0, 1]");
    }
    std::set<std::string> fnames;
    for (const auto& f : m_.functions) {
      if (!fnames.insert(f.name).second)
        invalid("duplicate function '" + f.name + "'");
      require_type(f.argument_type, {});
      require_type(f.result_type, {});
      for (const auto& obj : m_.objects_of_type(f.argument_type)) {
        if (!f.mapping.count(obj))
          invalid("function '" + f.name + "' is not defined for '" + obj + "'");
      }
      for (const auto& [arg, value] : f.mapping) {
        require_object_of(arg, f.argument_type, {});
        require_object_of(value, f.result_type, {});
      }
    }
    for (const auto& [name, a] : m_.actions) check_action(a);
  }

 private:
  using Scope = std::map<std::string, std::string>;  // variable -> type

  void require_type(const std::string& type, SourceLoc loc) {
    if (!m_.types.count(type)) invalid("undeclared type '" + type + "'", loc);
  }

  void require_object_of(const std::string& obj, const std::string& type,
                         SourceLoc loc) {
    auto it = m_.objects.find(obj);
    if (it == m_.objects.end()) invalid("undeclared object '" + obj + "'", loc);
    if (it->second != type)
      invalid("object '" + obj + "' has type " + it->second + ", expected " + type,
              loc);
  }

  // Returns the term's type.
  std::string check_term(const Term& t, const Scope& scope, SourceLoc loc) {
    switch (t.kind) {
      case Term::Kind::kVariable: {
        auto it = scope.find(t.name);
        if (it == scope.end())
          invalid("variable ?" + t.name + " is not a parameter", loc);
        return it->second;
      }
      case Term::Kind::kConstant: {
        auto it = m_.objects.find(t.name);
        if (it == m_.objects.end())
          invalid("undeclared object '" + t.name + "'", loc);
        return it->second;
      }
      case Term::Kind::kApply: {
        const FunctionDecl* f = m_.function(t.name);
        if (!f) invalid("undeclared function '" + t.name + "'", loc);
        std::string arg = check_term(t.args.at(0), scope, loc);
        if (arg != f->argument_type)
          invalid("function '" + t.name + "' expects " + f->argument_type +
                      ", got " + arg,
                  loc);
        return f->result_type;
      }
    }
    return {};
  }

  void check_literal(const LiteralTemplate& lit, const Scope& scope) {
    std::vector<std::string> types;
    for (const auto& t : lit.args) types.push_back(check_term(t, scope, lit.loc));
    auto [it, inserted] = arity_.emplace(lit.predicate, lit.args.size());
    if (!inserted && it->second != lit.args.size())
      invalid("predicate '" + lit.predicate + "' used with " +
                  std::to_string(lit.args.size()) + " arguments, expected " +
                  std::to_string(it->second),
              lit.loc);
    auto decl = m_.predicates.find(lit.predicate);
    if (decl != m_.predicates.end()) {
      for (size_t i = 0; i < types.size(); ++i) {
        if (types[i] != decl->second.arg_types[i])
          invalid("predicate '" + lit.predicate + "' argument " +
                      std::to_string(i + 1) + " expects " +
                      decl->second.arg_types[i] + ", got " + types[i],
                  lit.loc);
      }
    }
  }

  void check_expr(const Expr& e, const Scope& scope,
                  const std::vector<LiteralTemplate>& assigned,
                  const std::set<std::string>& implicit_names) {
    switch (e.kind) {
      case Expr::Kind::kPrior:
        check_literal(e.literal, scope);
        break;
      case Expr::Kind::kNew: {
        check_literal(e.literal, scope);
        bool found = std::any_of(assigned.begin(), assigned.end(),
                                 [&](const LiteralTemplate& t) {
                                   return t.same_atom(e.literal);
                                 });
        if (!found)
          invalid("forward reference: (new (" + e.literal.predicate +
                      " ...)) is not assigned earlier in the program",
                  e.loc);
        break;
      }
      case Expr::Kind::kBound:
        if (!scope.count(e.name)) invalid("?" + e.name + " is not a parameter", e.loc);
        break;
      case Expr::Kind::kEqual:
        for (const auto& t : e.terms) check_term(t, scope, e.loc);
        break;
      default:
        break;
    }
    for (const auto& op : e.operands) check_expr(op, scope, assigned, implicit_names);
  }

  void check_statements(const std::vector<Statement>& body, Scope scope,
                        std::vector<LiteralTemplate>& assigned,
                        const std::set<std::string>& implicit_names) {
    for (const auto& s : body) {
      switch (s.kind) {
        case Statement::Kind::kAssign:
          check_literal(s.target, scope);
          check_expr(s.value, scope, assigned, implicit_names);
          assigned.push_back(s.target);
          break;
        case Statement::Kind::kWhen:
          check_expr(s.condition, scope, assigned, implicit_names);
          check_statements(s.body, scope, assigned, implicit_names);
          break;
        case Statement::Kind::kForall: {
          Scope inner = scope;
          for (const auto& p : s.bound) {
            require_type(p.type, s.loc);
            inner[p.name] = p.type;
          }
          check_statements(s.body, inner, assigned, implicit_names);
          break;
        }
      }
    }
  }

  void check_action(const ActionSchema& a) {
    Scope scope;
    std::set<std::string> implicit_names;
    for (const auto& p : a.parameters) {
      require_type(p.type, a.loc);
      if (!scope.emplace(p.name, p.type).second)
        invalid("duplicate parameter ?" + p.name + " in " + a.name, a.loc);
    }
    for (const auto& p : a.implicit) {
      require_type(p.type, a.loc);
      if (!scope.emplace(p.name, p.type).second)
        invalid("duplicate parameter ?" + p.name + " in " + a.name, a.loc);
      implicit_names.insert(p.name);
    }
    for (const auto& l : a.precondition) check_literal(l, scope);
    for (const auto& l : a.postcondition) check_literal(l, scope);

    const auto& prog = a.belief_update;
    int successes = 0;
    for (const auto& v : prog.vars) {
      if (v.success) ++successes;
      if (!m_.params.count(v.alpha))
        invalid("action '" + a.name + "' uses undeclared parameter '" + v.alpha + "'",
                a.loc);
    }
    if (successes != 1)
      invalid("action '" + a.name + "' must declare exactly one success variable",
              a.loc);
    std::vector<LiteralTemplate> assigned;
    check_statements(prog.statements, scope, assigned, implicit_names);

    std::set<std::string> labels;
    for (const auto& entry : a.failure_evidence) {
      if (!labels.insert(entry.label).second)
        invalid("duplicate failure label '" + entry.label + "' in " + a.name, a.loc);
      if (entry.literals.empty())
        invalid("failure label '" + entry.label + "' assigns no literal", a.loc);
      for (const auto& lit : entry.literals) {
        check_literal(lit, scope);
        auto mentions = [&](const std::vector<LiteralTemplate>& conj) {
          return std::any_of(conj.begin(), conj.end(),
                             [&](const LiteralTemplate& t) { return t.same_atom(lit); });
        };
        if (!mentions(a.precondition) && !mentions(a.postcondition))
          invalid("failure evidence '" + entry.label +
                      "' must refer to precondition or postcondition literals",
                  lit.loc);
      }
    }
  }

  const RobotModel& m_;
  std::map<std::string, size_t> arity_;
};

// ---------------------------------------------------------------------------
// Printing

std::string quote(const std::string& atom) {
  return to_string(SExpr::make_atom(atom, needs_quotes(atom)));
}

std::string print_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::kVariable:
      return "?" + t.name;
    case Term::Kind::kConstant:
      return quote(t.name);
    case Term::Kind::kApply:
      return "(" + t.name + " " + print_term(t.args.at(0)) + ")";
  }
  return {};
}

std::string print_atom(const LiteralTemplate& l) {
  std::string out = "(" + l.predicate;
  for (const auto& t : l.args) out += " " + print_term(t);
  return out + ")";
}

std::string print_literal(const LiteralTemplate& l) {
  return l.positive ? print_atom(l) : "(not " + print_atom(l) + ")";
}

std::string print_conjunction(const std::vector<LiteralTemplate>& c) {
  std::string out = "(and";
  for (const auto& l : c) out += " " + print_literal(l);
  return out + ")";
}

std::string print_expr(const Expr& e) {
  auto nary = [&](const char* op) {
    std::string out = std::string("(") + op;
    for (const auto& o : e.operands) out += " " + print_expr(o);
    return out + ")";
  };
  switch (e.kind) {
    case Expr::Kind::kTrue:
      return "true";
    case Expr::Kind::kFalse:
      return "false";
    case Expr::Kind::kActionVar:
      return e.name;
    case Expr::Kind::kPrior:
      return print_atom(e.literal);
    case Expr::Kind::kNew:
      return "(new " + print_atom(e.literal) + ")";
    case Expr::Kind::kNot:
      return nary("not");
    case Expr::Kind::kAnd:
      return nary("and");
    case Expr::Kind::kOr:
      return nary("or");
    case Expr::Kind::kBound:
      return "(bound ?" + e.name + ")";
    case Expr::Kind::kEqual:
      return "(= " + print_term(e.terms[0]) + " " + print_term(e.terms[1]) + ")";
  }
  return {};
}

void print_statement(const Statement& s, const std::string& indent,
                     std::ostringstream& out) {
  switch (s.kind) {
    case Statement::Kind::kAssign:
      out << indent << "(:= " << print_atom(s.target) << " " << print_expr(s.value)
          << ")";
      break;
    case Statement::Kind::kWhen:
      out << indent << "(when " << print_expr(s.condition);
      for (const auto& b : s.body) {
        out << "\n";
        print_statement(b, indent + "  ", out);
      }
      out << ")";
      break;
    case Statement::Kind::kForall:
      out << indent << "(forall (";
      for (size_t i = 0; i < s.bound.size(); ++i) {
        if (i) out << " ";
        out << "?" << s.bound[i].name << " - " << s.bound[i].type;
      }
      out << ")";
      for (const auto& b : s.body) {
        out << "\n";
        print_statement(b, indent + "  ", out);
      }
      out << ")";
      break;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

const ActionVarDecl& ActionSchema::success_var() const {
  for (const auto& v : belief_update.vars)
    if (v.success) return v;
  throw std::logic_error("action '" + name + "' has no success variable");
}

const FailureEvidenceEntry* ActionSchema::find_evidence(std::string_view label) const {
  for (const auto& e : failure_evidence)
    if (e.label == label) return &e;
  return nullptr;
}

const ActionSchema& RobotModel::action(std::string_view n) const {
  auto it = actions.find(std::string(n));
  if (it == actions.end()) throw GroundingError("unknown action '" + std::string(n) + "'");
  return it->second;
}

const FunctionDecl* RobotModel::function(std::string_view n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}

std::vector<std::string> RobotModel::objects_of_type(std::string_view type) const {
  std::vector<std::string> out;
  for (const auto& [name, t] : objects)
    if (t == type) out.push_back(name);
  return out;
}

RobotModel parse_model(std::string_view text) {
  std::vector<SExpr> forms = read_sexprs(text);
  if (forms.size() != 1)
    throw ParseError("a model file holds exactly one (define ...) form",
                     forms.empty() ? SourceLoc{1, 1} : forms[1].loc);
  RobotModel m = parse_define(forms.front());
  validate_model(m);
  return m;
}

RobotModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

void validate_model(const RobotModel& model) { Validator(model).run(); }

void set_params(RobotModel& model, const std::map<std::string, double>& values) {
  for (const auto& [name, v] : values) {
    auto it = model.params.find(name);
    if (it == model.params.end())
      throw ValidationError("unknown parameter '" + name + "'", {});
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError("parameter '" + name + "' is outside [0, 1]", {});
    it->second = v;
  }
}

std::string print_model(const RobotModel& m) {
  std::ostringstream out;
  out << "(define (domain " << quote(m.name) << ")\n";
  out << "  (:types";
  for (const auto& t : m.types) out << " " << t;
  out << ")\n";
  std::map<std::string, std::vector<std::string>> by_type;
  for (const auto& [name, type] : m.objects) by_type[type].push_back(name);
  out << "  (:objects";
  for (const auto& [type, names] : by_type) {
    out << "\n   ";
    for (const auto& n : names) out << " " << quote(n);
    out << " - " << type;
  }
  out << ")\n";
  if (!m.predicates.empty()) {
    out << "  (:predicates";
    for (const auto& [name, p] : m.predicates) {
      out << " (" << name;
      for (size_t i = 0; i < p.arg_types.size(); ++i)
        out << " ?a" << i << " - " << p.arg_types[i];
      out << ")";
    }
    out << ")\n";
  }
  if (!m.functions.empty()) {
    out << "  (:functions";
    for (const auto& f : m.functions) {
      out << "\n    (" << f.name << " ?x - " << f.argument_type << ") - "
          << f.result_type << " (";
      bool first = true;
      for (const auto& [arg, value] : f.mapping) {
        out << (first ? "" : " ") << "(" << quote(arg) << " " << quote(value) << ")";
        first = false;
      }
      out << ")";
    }
    out << ")\n";
  }
  out << "  (:params";
  for (const auto& [name, v] : m.params) {
    std::ostringstream num;
    num.precision(17);
    num << v;
    out << " (" << name << " " << num.str() << ")";
  }
  out << ")";
  for (const auto& [name, a] : m.actions) {
    out << "\n  (:action " << a.name << "\n    :parameters (";
    for (size_t i = 0; i < a.parameters.size(); ++i) {
      if (i) out << " ";
      out << "?" << a.parameters[i].name << " - " << a.parameters[i].type;
    }
    out << ")";
    if (!a.implicit.empty()) {
      out << "\n    :implicit (";
      for (size_t i = 0; i < a.implicit.size(); ++i) {
        const auto& p = a.implicit[i];
        if (i) out << " ";
        out << "(?" << p.name << " - " << p.type << " " << p.family
            << (p.optional ? " :optional" : "") << ")";
      }
      out << ")";
    }
    out << "\n    :precondition " << print_conjunction(a.precondition);
    out << "\n    :postcondition " << print_conjunction(a.postcondition);
    out << "\n    :belief-update (";
    bool first = true;
    for (const auto& v : a.belief_update.vars) {
      if (!first) out << "\n                    ";
      out << "(" << (v.success ? "success " : "aux ") << v.name << " " << v.alpha
          << ")";
      first = false;
    }
    for (const auto& s : a.belief_update.statements) {
      out << "\n";
      print_statement(s, "                    ", out);
    }
    out << ")";
    if (!a.failure_evidence.empty()) {
      out << "\n    :failure-evidence (";
      for (size_t i = 0; i < a.failure_evidence.size(); ++i) {
        if (i) out << " ";
        out << "(" << quote(a.failure_evidence[i].label) << " "
            << print_conjunction(a.failure_evidence[i].literals) << ")";
      }
      out << ")";
    }
    out << ")";
  }
  out << ")\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

struct Unbound {
  std::string variable;
};

using Env = std::map<std::string, std::optional<std::string>>;

class Grounder {
 public:
  Grounder(const RobotModel& m, const ActionSchema& a, GroundAction& out)
      : m_(m), a_(a), out_(out) {}

  std::string term(const Term& t, const Env& env) const {
    switch (t.kind) {
      case Term::Kind::kConstant:
        return t.name;
      case Term::Kind::kVariable: {
        auto it = env.find(t.name);
        if (it == env.end())
          throw GroundingError("variable ?" + t.name + " is not bound");
        if (!it->second) throw Unbound{t.name};
        return *it->second;
      }
      case Term::Kind::kApply: {
        const FunctionDecl* f = m_.function(t.name);
        std::string arg = term(t.args.at(0), env);
        auto hit = f->mapping.find(arg);
        if (hit == f->mapping.end())
          throw GroundingError("function '" + t.name + "' undefined for '" + arg + "'");
        return hit->second;
      }
    }
    return {};
  }

  Literal literal(const LiteralTemplate& l, const Env& env) const {
    Literal out{l.predicate, {}};
    for (const auto& t : l.args) out.args.push_back(term(t, env));
    return out;
  }

  // Literals that mention an unbound optional parameter are dropped.
  std::vector<GroundLiteral> conjunction(const std::vector<LiteralTemplate>& c,
                                         const Env& env) const {
    std::vector<GroundLiteral> out;
    for (const auto& l : c) {
      try {
        out.push_back({literal(l, env), l.positive});
      } catch (const Unbound&) {
      }
    }
    return out;
  }

  GroundExpr expr(const Expr& e, const Env& env) {
    switch (e.kind) {
      case Expr::Kind::kTrue:
        return GroundExpr::constant(true);
      case Expr::Kind::kFalse:
        return GroundExpr::constant(false);
      case Expr::Kind::kActionVar: {
        GroundExpr g;
        g.kind = GroundExpr::Kind::kVar;
        for (size_t i = 0; i < out_.vars.size(); ++i)
          if (out_.vars[i].name == e.name) g.var = static_cast<int>(i);
        return g;
      }
      case Expr::Kind::kPrior: {
        GroundExpr g;
        g.kind = GroundExpr::Kind::kPrior;
        g.literal = literal(e.literal, env);
        return g;
      }
      case Expr::Kind::kNew: {
        Literal lit = literal(e.literal, env);
        auto it = assigned_.find(lit);
        if (it == assigned_.end())
          throw GroundingError("forward reference to " + to_string(lit) + " in " +
                               a_.name);
        return out_.updates[it->second].value;
      }
      case Expr::Kind::kBound: {
        auto it = env.find(e.name);
        return GroundExpr::constant(it != env.end() && it->second.has_value());
      }
      case Expr::Kind::kEqual: {
        try {
          return GroundExpr::constant(term(e.terms[0], env) == term(e.terms[1], env));
        } catch (const Unbound&) {
          return GroundExpr::constant(false);
        }
      }
      case Expr::Kind::kNot: {
        GroundExpr inner = expr(e.operands[0], env);
        if (inner.kind == GroundExpr::Kind::kConst) return GroundExpr::constant(!inner.value);
        GroundExpr g;
        g.kind = GroundExpr::Kind::kNot;
        g.operands.push_back(std::move(inner));
        return g;
      }
      case Expr::Kind::kAnd:
      case Expr::Kind::kOr: {
        bool is_and = e.kind == Expr::Kind::kAnd;
        GroundExpr g;
        g.kind = is_and ? GroundExpr::Kind::kAnd : GroundExpr::Kind::kOr;
        // Short-circuit left to right so guards like (and (bound ?v) ...)
        // protect the operands that follow them.
        for (const auto& op : e.operands) {
          GroundExpr sub = expr(op, env);
          if (sub.kind == GroundExpr::Kind::kConst) {
            if (sub.value != is_and) return GroundExpr::constant(!is_and);
            continue;
          }
          g.operands.push_back(std::move(sub));
        }
        if (g.operands.empty()) return GroundExpr::constant(is_and);
        if (g.operands.size() == 1) return g.operands.front();
        return g;
      }
    }
    return {};
  }

  void statements(const std::vector<Statement>& body, const Env& env) {
    for (const auto& s : body) {
      switch (s.kind) {
        case Statement::Kind::kAssign: {
          Literal target;
          try {
            target = literal(s.target, env);
          } catch (const Unbound& u) {
            throw GroundingError("action '" + a_.name + "' assigns a literal of unbound ?" +
                                 u.variable + "; guard it with (when (bound ?" +
                                 u.variable + ") ...)");
          }
          GroundExpr value;
          try {
            value = expr(s.value, env);
          } catch (const Unbound& u) {
            throw GroundingError("action '" + a_.name + "' reads a literal of unbound ?" +
                                 u.variable);
          }
          auto it = assigned_.find(target);
          if (it != assigned_.end()) {
            out_.updates[it->second].value = std::move(value);
          } else {
            assigned_.emplace(target, out_.updates.size());
            out_.updates.push_back({target, std::move(value)});
          }
          break;
        }
        case Statement::Kind::kWhen: {
          GroundExpr cond = expr(s.condition, env);
          if (cond.kind != GroundExpr::Kind::kConst)
            throw GroundingError("when-condition in '" + a_.name +
                                 "' must be decidable at grounding time");
          if (cond.value) statements(s.body, env);
          break;
        }
        case Statement::Kind::kForall:
          forall(s, 0, env);
          break;
      }
    }
  }

 private:
  void forall(const Statement& s, size_t index, const Env& env) {
    if (index == s.bound.size()) {
      statements(s.body, env);
      return;
    }
    for (const auto& obj : m_.objects_of_type(s.bound[index].type)) {
      Env inner = env;
      inner[s.bound[index].name] = obj;
      forall(s, index + 1, inner);
    }
  }

  const RobotModel& m_;
  const ActionSchema& a_;
  GroundAction& out_;
  std::map<Literal, size_t> assigned_;
};

}  // namespace

GroundAction ground_action(const RobotModel& model, std::string_view action,
                           const ArgMap& args, const HoldsFn& holds,
                           const std::set<std::string>& unbound) {
  const ActionSchema& schema = model.action(action);
  auto check_object = [&](const std::string& param, const std::string& type,
                          const std::string& obj) {
    auto it = model.objects.find(obj);
    if (it == model.objects.end())
      throw GroundingError(schema.name + ": unknown object '" + obj + "' for ?" + param);
    if (it->second != type)
      throw GroundingError(schema.name + ": ?" + param + " expects " + type + ", got '" +
                           obj + "' of type " + it->second);
  };
  for (const auto& [name, value] : args) {
    bool known = std::any_of(schema.parameters.begin(), schema.parameters.end(),
                             [&](const Parameter& p) { return p.name == name; }) ||
                 std::any_of(schema.implicit.begin(), schema.implicit.end(),
                             [&](const ImplicitParameter& p) { return p.name == name; });
    if (!known) throw GroundingError(schema.name + ": no parameter ?" + name);
  }

  GroundAction out;
  out.schema = schema.name;
  Env env;
  for (const auto& p : schema.parameters) {
    auto it = args.find(p.name);
    if (it == args.end())
      throw GroundingError(schema.name + ": missing argument ?" + p.name);
    check_object(p.name, p.type, it->second);
    env[p.name] = it->second;
    out.explicit_args.emplace_back(p.name, it->second);
  }
  for (const auto& p : schema.implicit) {
    std::optional<std::string> value;
    if (auto it = args.find(p.name); it != args.end()) {
      check_object(p.name, p.type, it->second);
      value = it->second;
    } else if (unbound.count(p.name)) {
      if (!p.optional)
        throw GroundingError(schema.name + ": ?" + p.name + " is required");
    } else {
      std::vector<std::string> candidates;
      for (const auto& obj : model.objects_of_type(p.type))
        if (holds(Literal{p.family, {obj}})) candidates.push_back(obj);
      if (candidates.size() == 1) {
        value = candidates.front();
      } else if (candidates.size() > 1) {
        std::string list;
        for (const auto& c : candidates) list += (list.empty() ? "" : ", ") + c;
        throw GroundingError(schema.name + ": implicit ?" + p.name + " is ambiguous (" +
                             p.family + " holds for " + list + ")");
      } else if (!p.optional) {
        throw GroundingError(schema.name + ": cannot infer ?" + p.name + ": no " +
                             p.family + "(" + p.type + ") holds");
      }
    }
    env[p.name] = value;
    out.implicit_args.emplace_back(p.name, value);
    if (p.optional) out.optional_params.insert(p.name);
  }

  for (const auto& v : schema.belief_update.vars)
    out.vars.push_back({v.name, v.alpha, model.params.at(v.alpha), v.success});

  Grounder g(model, schema, out);
  out.precondition = g.conjunction(schema.precondition, env);
  out.postcondition = g.conjunction(schema.postcondition, env);
  g.statements(schema.belief_update.statements, env);
  for (const auto& entry : schema.failure_evidence)
    out.failure_evidence.emplace_back(entry.label, g.conjunction(entry.literals, env));
  return out;
}

ArgMap bind_arguments(const RobotModel& model, std::string_view action,
                      const std::vector<std::string>& positional,
                      const ArgMap& named) {
  const ActionSchema& schema = model.action(action);
  if (positional.size() > schema.parameters.size())
    throw GroundingError(schema.name + " takes " +
                         std::to_string(schema.parameters.size()) + " arguments, got " +
                         std::to_string(positional.size()));
  ArgMap out = named;
  for (size_t i = 0; i < positional.size(); ++i) {
    const std::string& name = schema.parameters[i].name;
    if (out.count(name))
      throw GroundingError(schema.name + ": ?" + name + " given twice");
    out[name] = positional[i];
  }
  return out;
}

int GroundAction::success_var() const {
  for (size_t i = 0; i < vars.size(); ++i)
    if (vars[i].success) return static_cast<int>(i);
  return -1;
}

const std::vector<GroundLiteral>* GroundAction::evidence_for(std::string_view label) const {
  for (const auto& [l, lits] : failure_evidence)
    if (l == label) return &lits;
  return nullptr;
}

std::string GroundAction::key() const {
  std::string out = schema + "(";
  for (size_t i = 0; i < explicit_args.size(); ++i) {
    if (i) out += ", ";
    out += explicit_args[i].second;
  }
  return out + ")";
}

std::string GroundAction::display() const {
  std::string out = key();
  std::string extra;
  for (const auto& [name, value] : implicit_args) {
    if (!value) continue;
    extra += (extra.empty() ? "" : ", ") + name + "=" + *value;
  }
  if (!extra.empty()) out += "[" + extra + "]";
  return out;
}

ArgMap GroundAction::frozen_args() const {
  ArgMap out;
  for (const auto& [name, value] : explicit_args) out[name] = value;
  for (const auto& [name, value] : implicit_args)
    if (value && !optional_params.count(name)) out[name] = *value;
  return out;
}

GroundExpr simplify(const GroundExpr& e,
                    const std::function<bool(const Literal&)>& present) {
  switch (e.kind) {
    case GroundExpr::Kind::kConst:
    case GroundExpr::Kind::kVar:
      return e;
    case GroundExpr::Kind::kPrior:
      return present(e.literal) ? e : GroundExpr::constant(false);
    case GroundExpr::Kind::kNot: {
      GroundExpr inner = simplify(e.operands[0], present);
      if (inner.kind == GroundExpr::Kind::kConst) return GroundExpr::constant(!inner.value);
      GroundExpr g;
      g.kind = GroundExpr::Kind::kNot;
      g.operands.push_back(std::move(inner));
      return g;
    }
    case GroundExpr::Kind::kAnd:
    case GroundExpr::Kind::kOr: {
      bool is_and = e.kind == GroundExpr::Kind::kAnd;
      GroundExpr g;
      g.kind = e.kind;
      for (const auto& op : e.operands) {
        GroundExpr sub = simplify(op, present);
        if (sub.kind == GroundExpr::Kind::kConst) {
          if (sub.value != is_and) return GroundExpr::constant(!is_and);
          continue;
        }
        g.operands.push_back(std::move(sub));
      }
      if (g.operands.empty()) return GroundExpr::constant(is_and);
      if (g.operands.size() == 1) return g.operands.front();
      return g;
    }
  }
  return e;
}

bool evaluate(const GroundExpr& e, const std::function<bool(int)>& var_value,
              const std::function<bool(const Literal&)>& prior_value) {
  switch (e.kind) {
    case GroundExpr::Kind::kConst:
      return e.value;
    case GroundExpr::Kind::kVar:
      return var_value(e.var);
    case GroundExpr::Kind::kPrior:
      return prior_value(e.literal);
    case GroundExpr::Kind::kNot:
      return !evaluate(e.operands[0], var_value, prior_value);
    case GroundExpr::Kind::kAnd:
      for (const auto& op : e.operands)
        if (!evaluate(op, var_value, prior_value)) return false;
      return true;
    case GroundExpr::Kind::kOr:
      for (const auto& op : e.operands)
        if (evaluate(op, var_value, prior_value)) return true;
      return false;
  }
  return false;
}

void collect_leaves(const GroundExpr& e, std::set<int>& vars,
                    std::set<Literal>& priors) {
  if (e.kind == GroundExpr::Kind::kVar) vars.insert(e.var);
  if (e.kind == GroundExpr::Kind::kPrior) priors.insert(e.literal);
  for (const auto& op : e.operands) collect_leaves(op, vars, priors);
}

std::string to_string(const GroundExpr& e, const GroundAction& owner) {
  auto nary = [&](const char* op) {
    std::string out = std::string("(") + op;
    for (const auto& o : e.operands) out += " " + to_string(o, owner);
    return out + ")";
  };
  switch (e.kind) {
    case GroundExpr::Kind::kConst:
      return e.value ? "true" : "false";
    case GroundExpr::Kind::kVar:
      return owner.vars.at(e.var).name;
    case GroundExpr::Kind::kPrior:
      return to_string(e.literal);
    case GroundExpr::Kind::kNot:
      return nary("not");
    case GroundExpr::Kind::kAnd:
      return nary("and");
    case GroundExpr::Kind::kOr:
      return nary("or");
  }
  return {};
}

}  // namespace retrace
