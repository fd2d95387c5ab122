#include "mlprov/parser.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

#include "mlprov/lexer.hpp"

namespace mlprov::py {

const char *kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Module: return "Module";
    case NodeKind::Import: return "Import";
    case NodeKind::ImportFrom: return "ImportFrom";
    case NodeKind::Assign: return "Assign";
    case NodeKind::Call: return "Call";
    case NodeKind::Attribute: return "Attribute";
    case NodeKind::Name: return "Name";
    case NodeKind::Constant: return "Constant";
    case NodeKind::Subscript: return "Subscript";
    case NodeKind::Slice: return "Slice";
    case NodeKind::ExtSlice: return "ExtSlice";
    case NodeKind::Index: return "Index";
    case NodeKind::Delete: return "Delete";
    case NodeKind::List: return "List";
    case NodeKind::Tuple: return "Tuple";
    case NodeKind::Keyword: return "Keyword";
    case NodeKind::Expr: return "Expr";
    case NodeKind::BinOp: return "BinOp";
    case NodeKind::Other: return "Other";
  }
  return "Other";
}

AstNode AstNode::absent(int line) {
  AstNode n;
  n.kind = NodeKind::Other;
  n.other_kind = "Absent";
  n.line = line;
  return n;
}

const std::string &AstNode::ident() const {
  static const std::string empty;
  if (payload && std::holds_alternative<std::string>(*payload))
    return std::get<std::string>(*payload);
  return empty;
}

std::size_t AstNode::subtree_size() const {
  std::size_t n = 1;
  for (const auto &c : children) n += c.subtree_size();
  return n;
}

namespace {

struct SyntaxErrorEx {
  std::string message;
  int line;
  int col;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AstNode parse_module() {
    AstNode mod;
    mod.kind = NodeKind::Module;
    mod.line = 1;
    while (!at(TokKind::EndMarker)) {
      if (accept_newline()) continue;
      parse_statement(mod.children);
    }
    return mod;
  }

private:
  // ---- token helpers ----
  const Token &cur() const { return toks_[idx_]; }
  const Token &peek(std::size_t k = 1) const {
    return toks_[std::min(idx_ + k, toks_.size() - 1)];
  }
  bool at(TokKind k) const { return cur().kind == k; }
  bool at_op(const char *t) const { return cur().kind == TokKind::Op && cur().text == t; }
  bool at_kw(const char *t) const { return cur().kind == TokKind::Keyword && cur().text == t; }
  const Token &advance() { return toks_[idx_++]; }

  bool accept_op(const char *t) {
    if (at_op(t)) {
      ++idx_;
      return true;
    }
    return false;
  }
  bool accept_kw(const char *t) {
    if (at_kw(t)) {
      ++idx_;
      return true;
    }
    return false;
  }
  bool accept_newline() {
    if (at(TokKind::Newline)) {
      ++idx_;
      return true;
    }
    return false;
  }

  void expect_op(const char *t) {
    if (!accept_op(t)) fail(std::string("expected '") + t + "'");
  }
  void expect_kw(const char *t) {
    if (!accept_kw(t)) fail(std::string("expected '") + t + "'");
  }
  void expect_newline() {
    if (!accept_newline() && !at(TokKind::EndMarker)) fail("expected end of line");
  }

  [[noreturn]] void fail(const std::string &msg) const {
    throw SyntaxErrorEx{msg, cur().line, cur().col};
  }

  std::string expect_name() {
    if (!at(TokKind::Name)) fail("expected identifier");
    return advance().text;
  }

  // ---- node helpers ----
  static AstNode make(NodeKind k, int line) {
    AstNode n;
    n.kind = k;
    n.line = line;
    return n;
  }
  static AstNode other(const std::string &kind, int line) {
    AstNode n;
    n.kind = NodeKind::Other;
    n.other_kind = kind;
    n.line = line;
    return n;
  }
  static AstNode name_node(const std::string &id, int line) {
    AstNode n = make(NodeKind::Name, line);
    n.payload = Literal{id};
    return n;
  }
  static AstNode body_node(int line) { return other("Body", line); }

  // ---- statements ----
  void parse_statement(std::vector<AstNode> &out) {
    if (at_op("@")) {
      parse_decorated(out);
      return;
    }
    if (at(TokKind::Keyword)) {
      const std::string &kw = cur().text;
      if (kw == "if") return out.push_back(parse_if());
      if (kw == "while") return out.push_back(parse_while());
      if (kw == "for") return out.push_back(parse_for());
      if (kw == "try") return out.push_back(parse_try());
      if (kw == "with") return out.push_back(parse_with());
      if (kw == "def") return out.push_back(parse_funcdef());
      if (kw == "class") return out.push_back(parse_classdef());
      if (kw == "async") {
        advance();
        if (at_kw("def")) return out.push_back(parse_funcdef());
        if (at_kw("for")) return out.push_back(parse_for());
        if (at_kw("with")) return out.push_back(parse_with());
        fail("expected 'def', 'for' or 'with' after 'async'");
      }
    }
    parse_simple_stmt_line(out);
  }

  void parse_decorated(std::vector<AstNode> &out) {
    // Decorator expressions are parsed and dropped; only the decorated
    // definition is kept.
    while (accept_op("@")) {
      parse_test();
      expect_newline();
      while (accept_newline()) {
      }
    }
    if (at_kw("def")) {
      out.push_back(parse_funcdef());
    } else if (at_kw("class")) {
      out.push_back(parse_classdef());
    } else if (at_kw("async")) {
      advance();
      if (!at_kw("def")) fail("expected 'def' after decorators");
      out.push_back(parse_funcdef());
    } else {
      fail("expected 'def' or 'class' after decorators");
    }
  }

  void parse_simple_stmt_line(std::vector<AstNode> &out) {
    parse_small_stmt(out);
    while (accept_op(";")) {
      if (at(TokKind::Newline) || at(TokKind::EndMarker)) break;
      parse_small_stmt(out);
    }
    expect_newline();
  }

  void parse_small_stmt(std::vector<AstNode> &out) {
    int line = cur().line;
    if (at_kw("import")) return parse_import(out);
    if (at_kw("from")) return out.push_back(parse_from_import());
    if (at_kw("del")) return out.push_back(parse_del());
    if (accept_kw("pass")) return out.push_back(other("Pass", line));
    if (accept_kw("break")) return out.push_back(other("Break", line));
    if (accept_kw("continue")) return out.push_back(other("Continue", line));
    if (at_kw("return")) return out.push_back(parse_return());
    if (at_kw("raise")) return out.push_back(parse_raise());
    if (at_kw("assert")) return out.push_back(parse_assert());
    if (accept_kw("global") || accept_kw("nonlocal")) {
      AstNode n = other("Scope", line);
      n.children.push_back(name_node(expect_name(), line));
      while (accept_op(",")) n.children.push_back(name_node(expect_name(), line));
      return out.push_back(std::move(n));
    }
    if (at_kw("yield")) {
      AstNode e = make(NodeKind::Expr, line);
      e.children.push_back(parse_yield());
      return out.push_back(std::move(e));
    }
    out.push_back(parse_expr_stmt());
  }

  void parse_import(std::vector<AstNode> &out) {
    int line = cur().line;
    expect_kw("import");
    // `import a.b as x, c` is split into one Import node per alias.
    while (true) {
      std::string mod = expect_name();
      while (accept_op(".")) mod += "." + expect_name();
      AstNode n = make(NodeKind::Import, line);
      n.payload = Literal{mod};
      if (accept_kw("as")) n.children.push_back(name_node(expect_name(), line));
      out.push_back(std::move(n));
      if (!accept_op(",")) break;
    }
  }

  AstNode parse_from_import() {
    int line = cur().line;
    expect_kw("from");
    std::string mod;
    while (accept_op(".")) mod += ".";   // relative imports keep their dots
    if (at(TokKind::Name)) {
      mod += expect_name();
      while (accept_op(".")) mod += "." + expect_name();
    }
    expect_kw("import");
    AstNode n = make(NodeKind::ImportFrom, line);
    n.payload = Literal{mod};
    if (accept_op("*")) {
      n.children.push_back(name_node("*", line));
      return n;
    }
    bool paren = accept_op("(");
    while (true) {
      std::string item = expect_name();
      if (accept_kw("as")) {
        AstNode kw = make(NodeKind::Keyword, line);
        kw.payload = Literal{expect_name()};
        kw.children.push_back(name_node(item, line));
        n.children.push_back(std::move(kw));
      } else {
        n.children.push_back(name_node(item, line));
      }
      if (!accept_op(",")) break;
      if (paren && at_op(")")) break;
    }
    if (paren) expect_op(")");
    return n;
  }

  AstNode parse_del() {
    int line = cur().line;
    expect_kw("del");
    AstNode n = make(NodeKind::Delete, line);
    n.children.push_back(parse_target());
    while (accept_op(",")) n.children.push_back(parse_target());
    return n;
  }

  AstNode parse_return() {
    int line = cur().line;
    expect_kw("return");
    AstNode n = other("Return", line);
    if (!at(TokKind::Newline) && !at_op(";") && !at(TokKind::EndMarker))
      n.children.push_back(parse_testlist());
    return n;
  }

  AstNode parse_raise() {
    int line = cur().line;
    expect_kw("raise");
    AstNode n = other("Raise", line);
    if (!at(TokKind::Newline) && !at_op(";") && !at(TokKind::EndMarker)) {
      n.children.push_back(parse_test());
      if (accept_kw("from")) n.children.push_back(parse_test());
    }
    return n;
  }

  AstNode parse_assert() {
    int line = cur().line;
    expect_kw("assert");
    AstNode n = other("Assert", line);
    n.children.push_back(parse_test());
    if (accept_op(",")) n.children.push_back(parse_test());
    return n;
  }

  AstNode parse_expr_stmt() {
    int line = cur().line;
    AstNode first = parse_testlist_star();
    // Annotated assignment: `x: T` or `x: T = v`.
    if (accept_op(":")) {
      parse_test();   // the annotation is discarded
      if (accept_op("=")) {
        AstNode assign = make(NodeKind::Assign, line);
        assign.children.push_back(std::move(first));
        assign.children.push_back(parse_testlist_star());
        return assign;
      }
      AstNode e = make(NodeKind::Expr, line);
      e.children.push_back(std::move(first));
      return e;
    }
    // Augmented assignment desugars to target = target <op> value.
    static const char *aug[] = {"+=", "-=", "*=", "/=", "//=", "%=", "**=",
                                ">>=", "<<=", "&=", "|=", "^=", "@="};
    for (const char *a : aug) {
      if (at_op(a)) {
        advance();
        AstNode binop = make(NodeKind::BinOp, line);
        std::string sym(a);
        sym.pop_back();
        binop.payload = Literal{sym};
        binop.children.push_back(first);
        binop.children.push_back(parse_testlist());
        AstNode assign = make(NodeKind::Assign, line);
        assign.children.push_back(std::move(first));
        assign.children.push_back(std::move(binop));
        return assign;
      }
    }
    if (at_op("=")) {
      // `a = b = value`: all but the last list are targets.
      std::vector<AstNode> parts;
      parts.push_back(std::move(first));
      while (accept_op("=")) parts.push_back(parse_testlist_star());
      AstNode assign = make(NodeKind::Assign, line);
      for (auto &p : parts) assign.children.push_back(std::move(p));
      return assign;
    }
    AstNode e = make(NodeKind::Expr, line);
    e.children.push_back(std::move(first));
    return e;
  }

  // ---- compound statements ----
  AstNode parse_suite() {
    AstNode body = body_node(cur().line);
    if (accept_newline()) {
      if (!at(TokKind::Indent)) fail("expected an indented block");
      advance();
      while (!at(TokKind::Dedent) && !at(TokKind::EndMarker)) {
        if (accept_newline()) continue;
        parse_statement(body.children);
      }
      if (at(TokKind::Dedent)) advance();
    } else {
      parse_simple_stmt_line(body.children);
    }
    return body;
  }

  AstNode parse_if() {
    int line = cur().line;
    advance();   // if / elif
    AstNode n = other("If", line);
    n.children.push_back(parse_test());
    expect_op(":");
    n.children.push_back(parse_suite());
    if (at_kw("elif")) {
      AstNode els = body_node(cur().line);
      els.children.push_back(parse_if());
      n.children.push_back(std::move(els));
    } else if (accept_kw("else")) {
      expect_op(":");
      n.children.push_back(parse_suite());
    } else {
      n.children.push_back(body_node(line));
    }
    return n;
  }

  AstNode parse_while() {
    int line = cur().line;
    expect_kw("while");
    AstNode n = other("While", line);
    n.children.push_back(parse_test());
    expect_op(":");
    n.children.push_back(parse_suite());
    if (accept_kw("else")) {
      expect_op(":");
      n.children.push_back(parse_suite());
    }
    return n;
  }

  AstNode parse_for() {
    int line = cur().line;
    expect_kw("for");
    AstNode n = other("For", line);
    n.children.push_back(parse_target_list());
    expect_kw("in");
    n.children.push_back(parse_testlist());
    expect_op(":");
    n.children.push_back(parse_suite());
    if (accept_kw("else")) {
      expect_op(":");
      n.children.push_back(parse_suite());
    }
    return n;
  }

  AstNode parse_try() {
    int line = cur().line;
    expect_kw("try");
    expect_op(":");
    AstNode n = other("Try", line);
    n.children.push_back(parse_suite());
    while (at_kw("except")) {
      advance();
      if (!at_op(":")) {
        parse_test();
        if (accept_kw("as")) expect_name();
      }
      expect_op(":");
      n.children.push_back(parse_suite());
    }
    if (accept_kw("else")) {
      expect_op(":");
      n.children.push_back(parse_suite());
    }
    if (accept_kw("finally")) {
      expect_op(":");
      n.children.push_back(parse_suite());
    }
    return n;
  }

  AstNode parse_with() {
    int line = cur().line;
    expect_kw("with");
    AstNode n = other("With", line);
    while (true) {
      AstNode item = other("WithItem", cur().line);
      item.children.push_back(parse_test());
      if (accept_kw("as")) item.children.push_back(parse_target());
      n.children.push_back(std::move(item));
      if (!accept_op(",")) break;
    }
    expect_op(":");
    n.children.push_back(parse_suite());
    return n;
  }

  AstNode parse_funcdef() {
    int line = cur().line;
    expect_kw("def");
    AstNode n = other("FunctionDef", line);
    n.payload = Literal{expect_name()};
    expect_op("(");
    AstNode params = other("Params", line);
    while (!at_op(")")) {
      if (accept_op("*") || accept_op("**")) {
        if (at(TokKind::Name)) params.children.push_back(name_node(expect_name(), line));
        // bare `*` separator otherwise
      } else {
        std::string p = expect_name();
        params.children.push_back(name_node(p, line));
        if (accept_op(":")) parse_test();
        if (accept_op("=")) parse_test();
      }
      if (!accept_op(",")) break;
    }
    expect_op(")");
    if (accept_op("->")) parse_test();
    expect_op(":");
    n.children.push_back(std::move(params));
    n.children.push_back(parse_suite());
    return n;
  }

  AstNode parse_classdef() {
    int line = cur().line;
    expect_kw("class");
    AstNode n = other("ClassDef", line);
    n.payload = Literal{expect_name()};
    if (accept_op("(")) {
      while (!at_op(")")) {
        if (at(TokKind::Name) && peek().kind == TokKind::Op && peek().text == "=") {
          advance();
          advance();
        }
        parse_test();
        if (!accept_op(",")) break;
      }
      expect_op(")");
    }
    expect_op(":");
    n.children.push_back(parse_suite());
    return n;
  }

  // ---- targets ----
  AstNode parse_target() { return parse_primary_expr(); }

  AstNode parse_target_list() {
    int line = cur().line;
    if (accept_op("(")) {
      AstNode t = parse_target_list();
      expect_op(")");
      return t;
    }
    AstNode first = parse_target();
    if (!at_op(",")) return first;
    AstNode tup = make(NodeKind::Tuple, line);
    tup.children.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_kw("in") || at_op("=") || at(TokKind::Newline)) break;
      tup.children.push_back(parse_target());
    }
    return tup;
  }

  // ---- expressions ----
  AstNode parse_testlist_star() { return parse_testlist_impl(true); }
  AstNode parse_testlist() { return parse_testlist_impl(false); }

  AstNode parse_testlist_impl(bool star_ok) {
    int line = cur().line;
    AstNode first = parse_star_or_test(star_ok);
    if (!at_op(",")) return first;
    AstNode tup = make(NodeKind::Tuple, line);
    tup.children.push_back(std::move(first));
    while (accept_op(",")) {
      if (ends_expression()) break;
      tup.children.push_back(parse_star_or_test(star_ok));
    }
    return tup;
  }

  bool ends_expression() const {
    return at(TokKind::Newline) || at(TokKind::EndMarker) || at_op("=") || at_op(")") ||
           at_op("]") || at_op("}") || at_op(":") || at_op(";");
  }

  AstNode parse_star_or_test(bool star_ok) {
    if (star_ok && accept_op("*")) {
      AstNode starred = other("Starred", cur().line);
      starred.children.push_back(parse_test());
      return starred;
    }
    return parse_test();
  }

  AstNode parse_test() {
    if (at_kw("lambda")) return parse_lambda();
    int line = cur().line;
    AstNode body = parse_or_test();
    if (at_kw("if")) {
      advance();
      AstNode cond = parse_or_test();
      expect_kw("else");
      AstNode orelse = parse_test();
      AstNode n = other("IfExp", line);
      n.children.push_back(std::move(body));
      n.children.push_back(std::move(cond));
      n.children.push_back(std::move(orelse));
      return n;
    }
    return body;
  }

  AstNode parse_lambda() {
    int line = cur().line;
    expect_kw("lambda");
    AstNode n = other("Lambda", line);
    AstNode params = other("Params", line);
    while (!at_op(":")) {
      if (accept_op("*") || accept_op("**")) {
        if (at(TokKind::Name)) params.children.push_back(name_node(expect_name(), line));
      } else {
        params.children.push_back(name_node(expect_name(), line));
        if (accept_op("=")) parse_test();
      }
      if (!accept_op(",")) break;
    }
    expect_op(":");
    n.children.push_back(std::move(params));
    n.children.push_back(parse_test());
    return n;
  }

  AstNode parse_or_test() {
    int line = cur().line;
    AstNode left = parse_and_test();
    while (at_kw("or")) {
      advance();
      AstNode n = other("BoolOp", line);
      n.payload = Literal{std::string("or")};
      n.children.push_back(std::move(left));
      n.children.push_back(parse_and_test());
      left = std::move(n);
    }
    return left;
  }

  AstNode parse_and_test() {
    int line = cur().line;
    AstNode left = parse_not_test();
    while (at_kw("and")) {
      advance();
      AstNode n = other("BoolOp", line);
      n.payload = Literal{std::string("and")};
      n.children.push_back(std::move(left));
      n.children.push_back(parse_not_test());
      left = std::move(n);
    }
    return left;
  }

  AstNode parse_not_test() {
    if (at_kw("not")) {
      int line = cur().line;
      advance();
      AstNode n = other("UnaryOp", line);
      n.payload = Literal{std::string("not")};
      n.children.push_back(parse_not_test());
      return n;
    }
    return parse_comparison();
  }

  AstNode parse_comparison() {
    int line = cur().line;
    AstNode left = parse_bitor();
    while (true) {
      std::string op;
      if (at_op("<") || at_op(">") || at_op("==") || at_op(">=") || at_op("<=") || at_op("!=")) {
        op = advance().text;
      } else if (at_kw("in")) {
        advance();
        op = "in";
      } else if (at_kw("not") && peek().kind == TokKind::Keyword && peek().text == "in") {
        advance();
        advance();
        op = "not in";
      } else if (at_kw("is")) {
        advance();
        op = "is";
        if (accept_kw("not")) op = "is not";
      } else {
        break;
      }
      AstNode n = other("Compare", line);
      n.payload = Literal{op};
      n.children.push_back(std::move(left));
      n.children.push_back(parse_bitor());
      left = std::move(n);
    }
    return left;
  }

  AstNode binop(AstNode left, const std::string &op, AstNode right, int line) {
    AstNode n = make(NodeKind::BinOp, line);
    n.payload = Literal{op};
    n.children.push_back(std::move(left));
    n.children.push_back(std::move(right));
    return n;
  }

  AstNode parse_bitor() {
    int line = cur().line;
    AstNode left = parse_bitxor();
    while (at_op("|")) {
      advance();
      left = binop(std::move(left), "|", parse_bitxor(), line);
    }
    return left;
  }
  AstNode parse_bitxor() {
    int line = cur().line;
    AstNode left = parse_bitand();
    while (at_op("^")) {
      advance();
      left = binop(std::move(left), "^", parse_bitand(), line);
    }
    return left;
  }
  AstNode parse_bitand() {
    int line = cur().line;
    AstNode left = parse_shift();
    while (at_op("&")) {
      advance();
      left = binop(std::move(left), "&", parse_shift(), line);
    }
    return left;
  }
  AstNode parse_shift() {
    int line = cur().line;
    AstNode left = parse_arith();
    while (at_op("<<") || at_op(">>")) {
      std::string op = advance().text;
      left = binop(std::move(left), op, parse_arith(), line);
    }
    return left;
  }
  AstNode parse_arith() {
    int line = cur().line;
    AstNode left = parse_term();
    while (at_op("+") || at_op("-")) {
      std::string op = advance().text;
      left = binop(std::move(left), op, parse_term(), line);
    }
    return left;
  }
  AstNode parse_term() {
    int line = cur().line;
    AstNode left = parse_factor();
    while (at_op("*") || at_op("/") || at_op("//") || at_op("%") || at_op("@")) {
      std::string op = advance().text;
      left = binop(std::move(left), op, parse_factor(), line);
    }
    return left;
  }
  AstNode parse_factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      int line = cur().line;
      std::string op = advance().text;
      // Fold unary minus into numeric constants so negative slice bounds
      // stay simple literals.
      if (op == "-" && at(TokKind::Number)) {
        Token t = advance();
        AstNode n = make(NodeKind::Constant, line);
        if (std::holds_alternative<std::int64_t>(t.value)) {
          n.payload = Literal{-std::get<std::int64_t>(t.value)};
        } else if (std::holds_alternative<double>(t.value)) {
          n.payload = Literal{-std::get<double>(t.value)};
        } else {
          n.payload = t.value;
        }
        return parse_trailers(std::move(n));
      }
      AstNode n = other("UnaryOp", line);
      n.payload = Literal{op};
      n.children.push_back(parse_factor());
      return n;
    }
    return parse_power();
  }
  AstNode parse_power() {
    int line = cur().line;
    AstNode left = parse_primary_expr();
    if (at_op("**")) {
      advance();
      return binop(std::move(left), "**", parse_factor(), line);
    }
    return left;
  }

  AstNode parse_primary_expr() {
    if (accept_kw("await")) return parse_primary_expr();
    return parse_trailers(parse_atom());
  }

  AstNode parse_trailers(AstNode base) {
    while (true) {
      if (at_op("(")) {
        base = parse_call(std::move(base));
      } else if (at_op("[")) {
        base = parse_subscript(std::move(base));
      } else if (at_op(".") && peek().kind == TokKind::Name) {
        int line = cur().line;
        advance();
        AstNode attr = make(NodeKind::Attribute, line);
        attr.payload = Literal{advance().text};
        attr.children.push_back(std::move(base));
        base = std::move(attr);
      } else {
        break;
      }
    }
    return base;
  }

  AstNode parse_call(AstNode func) {
    int line = cur().line;
    expect_op("(");
    AstNode call = make(NodeKind::Call, line);
    call.children.push_back(std::move(func));
    while (!at_op(")")) {
      if (accept_op("**")) {
        AstNode kw = make(NodeKind::Keyword, cur().line);
        kw.payload = Literal{std::string("**")};
        kw.children.push_back(parse_test());
        call.children.push_back(std::move(kw));
      } else if (accept_op("*")) {
        AstNode starred = other("Starred", cur().line);
        starred.children.push_back(parse_test());
        call.children.push_back(std::move(starred));
      } else if (at(TokKind::Name) && peek().kind == TokKind::Op && peek().text == "=") {
        AstNode kw = make(NodeKind::Keyword, cur().line);
        kw.payload = Literal{advance().text};
        advance();   // '='
        kw.children.push_back(parse_test());
        call.children.push_back(std::move(kw));
      } else {
        AstNode arg = parse_test();
        if (at_kw("for")) {
          arg = parse_comprehension(std::move(arg), "GeneratorExp", line);
        }
        call.children.push_back(std::move(arg));
      }
      if (!accept_op(",")) break;
    }
    expect_op(")");
    return call;
  }

  AstNode parse_subscript(AstNode value) {
    int line = cur().line;
    expect_op("[");
    std::vector<AstNode> items;
    while (!at_op("]")) {
      items.push_back(parse_subscript_item());
      if (!accept_op(",")) break;
    }
    expect_op("]");
    if (items.empty()) fail("empty subscript");
    AstNode sub = make(NodeKind::Subscript, line);
    sub.children.push_back(std::move(value));
    if (items.size() == 1) {
      AstNode &item = items[0];
      if (item.kind == NodeKind::Slice) {
        sub.children.push_back(std::move(item));
      } else {
        AstNode idx = make(NodeKind::Index, line);
        idx.children.push_back(std::move(item));
        sub.children.push_back(std::move(idx));
      }
    } else {
      AstNode ext = make(NodeKind::ExtSlice, line);
      for (auto &item : items) {
        if (item.kind == NodeKind::Slice) {
          ext.children.push_back(std::move(item));
        } else {
          AstNode idx = make(NodeKind::Index, item.line);
          idx.children.push_back(std::move(item));
          ext.children.push_back(std::move(idx));
        }
      }
      sub.children.push_back(std::move(ext));
    }
    return sub;
  }

  // One comma-separated subscript component; `a:b:c` forms a Slice with
  // three fixed child slots (absent bounds become Absent placeholders).
  AstNode parse_subscript_item() {
    int line = cur().line;
    AstNode lower = AstNode::absent(line);
    bool have_lower = false;
    if (!at_op(":")) {
      lower = parse_test();
      have_lower = true;
    }
    if (!at_op(":")) {
      if (!have_lower) fail("expected subscript expression");
      return lower;
    }
    advance();   // ':'
    AstNode slice = make(NodeKind::Slice, line);
    slice.children.push_back(std::move(lower));
    if (!at_op(":") && !at_op(",") && !at_op("]")) {
      slice.children.push_back(parse_test());
    } else {
      slice.children.push_back(AstNode::absent(line));
    }
    if (accept_op(":")) {
      if (!at_op(",") && !at_op("]")) {
        slice.children.push_back(parse_test());
      } else {
        slice.children.push_back(AstNode::absent(line));
      }
    } else {
      slice.children.push_back(AstNode::absent(line));
    }
    return slice;
  }

  AstNode parse_comprehension(AstNode element, const std::string &comp_kind, int line) {
    AstNode comp = other(comp_kind, line);
    comp.children.push_back(std::move(element));
    while (at_kw("for")) {
      advance();
      comp.children.push_back(parse_target_list());
      expect_kw("in");
      comp.children.push_back(parse_or_test());
      while (at_kw("if")) {
        advance();
        comp.children.push_back(parse_or_test());
      }
    }
    return comp;
  }

  AstNode parse_atom() {
    int line = cur().line;
    if (at_kw("yield")) return parse_yield();
    if (at(TokKind::Name)) {
      Token t = advance();
      // Walrus assignments are kept as a marker node; lambdas containing
      // them are reported as unsupported.
      if (at_op(":=")) {
        advance();
        AstNode n = other("NamedExpr", line);
        n.children.push_back(name_node(t.text, line));
        n.children.push_back(parse_test());
        return n;
      }
      return name_node(t.text, line);
    }
    if (at(TokKind::Number)) {
      Token t = advance();
      AstNode n = make(NodeKind::Constant, line);
      n.payload = t.value;
      return n;
    }
    if (at(TokKind::String)) {
      std::string text = std::get<std::string>(advance().value);
      while (at(TokKind::String)) text += std::get<std::string>(advance().value);
      if (at(TokKind::FString)) {
        while (at(TokKind::String) || at(TokKind::FString)) advance();
        return other("JoinedStr", line);
      }
      AstNode n = make(NodeKind::Constant, line);
      n.payload = Literal{text};
      return n;
    }
    if (at(TokKind::FString)) {
      while (at(TokKind::String) || at(TokKind::FString)) advance();
      return other("JoinedStr", line);
    }
    if (accept_kw("None")) {
      AstNode n = make(NodeKind::Constant, line);
      n.payload = Literal{NoneLit{}};
      return n;
    }
    if (accept_kw("True") || accept_kw("False")) {
      AstNode n = make(NodeKind::Constant, line);
      n.payload = Literal{toks_[idx_ - 1].text == "True"};
      return n;
    }
    if (at_kw("lambda")) return parse_lambda();
    if (accept_op("...")) return other("Ellipsis", line);
    if (accept_op("(")) {
      if (accept_op(")")) return make(NodeKind::Tuple, line);
      AstNode first = parse_star_or_test(true);
      if (at_kw("for")) {
        AstNode comp = parse_comprehension(std::move(first), "GeneratorExp", line);
        expect_op(")");
        return comp;
      }
      if (at_op(",")) {
        AstNode tup = make(NodeKind::Tuple, line);
        tup.children.push_back(std::move(first));
        while (accept_op(",")) {
          if (at_op(")")) break;
          tup.children.push_back(parse_star_or_test(true));
        }
        expect_op(")");
        return tup;
      }
      expect_op(")");
      return first;
    }
    if (accept_op("[")) {
      if (accept_op("]")) return make(NodeKind::List, line);
      AstNode first = parse_star_or_test(true);
      if (at_kw("for")) {
        AstNode comp = parse_comprehension(std::move(first), "ListComp", line);
        expect_op("]");
        return comp;
      }
      AstNode list = make(NodeKind::List, line);
      list.children.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op("]")) break;
        list.children.push_back(parse_star_or_test(true));
      }
      expect_op("]");
      return list;
    }
    if (accept_op("{")) {
      if (accept_op("}")) return other("Dict", line);
      // Distinguish dict vs set by the first entry.
      if (accept_op("**")) {
        AstNode d = other("Dict", line);
        d.children.push_back(parse_test());
        while (accept_op(",")) {
          if (at_op("}")) break;
          accept_op("**");
          d.children.push_back(parse_test());
          if (accept_op(":")) d.children.push_back(parse_test());
        }
        expect_op("}");
        return d;
      }
      AstNode first = parse_test();
      if (accept_op(":")) {
        AstNode value = parse_test();
        if (at_kw("for")) {
          AstNode comp = parse_comprehension(std::move(first), "DictComp", line);
          comp.children.push_back(std::move(value));
          expect_op("}");
          return comp;
        }
        AstNode d = other("Dict", line);
        d.children.push_back(std::move(first));
        d.children.push_back(std::move(value));
        while (accept_op(",")) {
          if (at_op("}")) break;
          if (accept_op("**")) {
            d.children.push_back(parse_test());
            continue;
          }
          d.children.push_back(parse_test());
          expect_op(":");
          d.children.push_back(parse_test());
        }
        expect_op("}");
        return d;
      }
      if (at_kw("for")) {
        AstNode comp = parse_comprehension(std::move(first), "SetComp", line);
        expect_op("}");
        return comp;
      }
      AstNode s = other("Set", line);
      s.children.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op("}")) break;
        s.children.push_back(parse_test());
      }
      expect_op("}");
      return s;
    }
    fail("unexpected token '" + cur().text + "'");
  }

  AstNode parse_yield() {
    int line = cur().line;
    expect_kw("yield");
    AstNode n = other("Yield", line);
    if (accept_kw("from")) {
      n.children.push_back(parse_test());
    } else if (!at(TokKind::Newline) && !at_op(")") && !at_op(";") && !at(TokKind::EndMarker)) {
      n.children.push_back(parse_testlist());
    }
    return n;
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

// Docstrings and other bare string statements carry no dataflow; dropping
// them here keeps commented-out-looking text away from the lowering pass.
void drop_bare_strings(AstNode &node) {
  auto is_docstring = [](const AstNode &n) {
    return n.kind == NodeKind::Expr && n.children.size() == 1 &&
           n.children[0].kind == NodeKind::Constant && n.children[0].payload &&
           std::holds_alternative<std::string>(*n.children[0].payload);
  };
  auto &kids = node.children;
  kids.erase(std::remove_if(kids.begin(), kids.end(), is_docstring), kids.end());
  for (auto &c : kids) drop_bare_strings(c);
}

int count_lines(const std::string &source) {
  if (source.empty()) return 0;
  int n = 1;
  for (char c : source)
    if (c == '\n') ++n;
  if (source.back() == '\n') --n;
  return n;
}

} // namespace

ParseResult parse_script(const std::string &source, const std::string &path) {
  ParseResult result;
  LexResult lex = tokenize(source);
  if (!lex.ok()) {
    const LexError &e = lex.errors.front();
    result.error = ParseError{e.message, e.line, e.col, e.encoding};
    return result;
  }
  try {
    Parser parser(std::move(lex.tokens));
    ScriptAst ast;
    ast.root = parser.parse_module();
    ast.source_path = path;
    ast.line_count = count_lines(source);
    drop_bare_strings(ast.root);
    result.ast = std::move(ast);
  } catch (const SyntaxErrorEx &e) {
    result.error = ParseError{e.message, e.line, e.col, false};
  }
  return result;
}

namespace {

bool lambda_has_assignment(const AstNode &n) {
  if (n.kind == NodeKind::Other && n.other_kind == "NamedExpr") return true;
  for (const auto &c : n.children)
    if (lambda_has_assignment(c)) return true;
  return false;
}

void scan_node(const AstNode &n, std::vector<UnsupportedNode> &out) {
  if (n.kind == NodeKind::Other) {
    if (n.other_kind == "DictComp" || n.other_kind == "SetComp" || n.other_kind == "JoinedStr") {
      out.push_back({n.other_kind, n.line});
    } else if (n.other_kind == "Lambda" && n.children.size() == 2 &&
               lambda_has_assignment(n.children[1])) {
      out.push_back({"Lambda", n.line});
    }
  }
  if (n.kind == NodeKind::ImportFrom) {
    for (const auto &c : n.children) {
      if (c.kind == NodeKind::Name && c.ident() == "*") {
        out.push_back({"ImportStar", n.line});
        break;
      }
    }
  }
  for (const auto &c : n.children) scan_node(c, out);
}

} // namespace

ParseDiagnostics scan_unsupported(const ScriptAst &ast) {
  ParseDiagnostics d;
  d.syntax_ok = true;
  d.python3_compatible = true;
  scan_node(ast.root, d.unsupported);
  std::stable_sort(d.unsupported.begin(), d.unsupported.end(),
                   [](const UnsupportedNode &a, const UnsupportedNode &b) { return a.line < b.line; });
  return d;
}

bool has_unsupported(const AstNode &node) {
  std::vector<UnsupportedNode> found;
  scan_node(node, found);
  return !found.empty();
}

std::string serialize_ast(const ScriptAst &ast) {
  std::ostringstream os;
  struct Writer {
    std::ostringstream &os;
    void write(const AstNode &n) {
      os << '(' << kind_name(n.kind);
      if (n.kind == NodeKind::Other) os << ':' << n.other_kind;
      os << '@' << n.line;
      if (n.payload) os << ' ' << literal_repr(*n.payload);
      for (const auto &c : n.children) {
        os << ' ';
        write(c);
      }
      os << ')';
    }
  } w{os};
  w.write(ast.root);
  return os.str();
}

} // namespace mlprov::py
