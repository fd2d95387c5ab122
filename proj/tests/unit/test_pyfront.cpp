#include <doctest.h>

#include "helpers.hpp"
#include "mlprov/parser.hpp"

using namespace mlprov;
using namespace mlprov::py;

namespace {

const AstNode *find_node(const AstNode &root, NodeKind kind, int line = -1) {
  if (root.kind == kind && (line < 0 || root.line == line)) return &root;
  for (const auto &c : root.children) {
    if (const AstNode *hit = find_node(c, kind, line)) return hit;
  }
  return nullptr;
}

} // namespace

TEST_CASE("heart-disease fixture parses with the expected shape") {
  std::string source = testutil::read_file(testutil::fixture("heart_disease.py"));
  ParseResult result = parse_script(source, "heart_disease.py");
  REQUIRE(result.ok());
  const ScriptAst &ast = *result.ast;
  CHECK(ast.root.kind == NodeKind::Module);
  CHECK(ast.line_count == 10);

  // Imports for catboost and sklearn.model_selection.
  const AstNode *imp = find_node(ast.root, NodeKind::ImportFrom, 2);
  REQUIRE(imp != nullptr);
  CHECK(imp->ident() == "catboost");

  // Line 4 is an assignment whose value is a read_csv call.
  const AstNode *assign = find_node(ast.root, NodeKind::Assign, 4);
  REQUIRE(assign != nullptr);
  const AstNode &value = assign->children.back();
  REQUIRE(value.kind == NodeKind::Call);
  REQUIRE(value.children[0].kind == NodeKind::Attribute);
  CHECK(value.children[0].ident() == "read_csv");

  // Line 5 subscripts with a two-dimensional slice.
  const AstNode *sub = find_node(ast.root, NodeKind::Subscript, 5);
  REQUIRE(sub != nullptr);
  REQUIRE(sub->children.size() == 2);
  const AstNode &ext = sub->children[1];
  REQUIRE(ext.kind == NodeKind::ExtSlice);
  REQUIRE(ext.children.size() == 2);
  CHECK(ext.children[0].kind == NodeKind::Slice);
  CHECK(ext.children[1].kind == NodeKind::Slice);
  const AstNode &cols = ext.children[1];
  REQUIRE(cols.children.size() == 3);
  REQUIRE(cols.children[0].kind == NodeKind::Constant);
  CHECK(std::get<std::int64_t>(*cols.children[0].payload) == 3);
  CHECK(cols.children[1].is_absent());
  CHECK(cols.children[2].is_absent());
}

TEST_CASE("empty source yields a module with no statements") {
  ParseResult result = parse_script("", "empty.py");
  REQUIRE(result.ok());
  CHECK(result.ast->root.kind == NodeKind::Module);
  CHECK(result.ast->root.children.empty());
  CHECK(result.ast->line_count == 0);
}

TEST_CASE("unbalanced paren is a syntax error at line 1") {
  ParseResult result = parse_script("x = (", "bad.py");
  REQUIRE(!result.ok());
  CHECK(result.error->line == 1);
  CHECK(!result.error->encoding);
}

TEST_CASE("python 2 print statement does not parse") {
  ParseResult result = parse_script("print 'hello'\n", "py2.py");
  CHECK(!result.ok());
}

TEST_CASE("invalid utf-8 reports an encoding error") {
  std::string source = "x = 1\n";
  source += static_cast<char>(0xC0);
  source += static_cast<char>(0x00);
  ParseResult result = parse_script(source, "latin.py");
  REQUIRE(!result.ok());
  CHECK(result.error->encoding);
}

TEST_CASE("scan_unsupported finds the declared construct set") {
  SUBCASE("set comprehension") {
    ParseResult r = parse_script("s = {x for x in y}\n", "t.py");
    REQUIRE(r.ok());
    ParseDiagnostics d = scan_unsupported(*r.ast);
    REQUIRE(d.unsupported.size() == 1);
    CHECK(d.unsupported[0].kind_name == "SetComp");
    CHECK(d.unsupported[0].line == 1);
  }
  SUBCASE("dict comprehension") {
    ParseResult r = parse_script("m = {k: v for k, v in pairs}\n", "t.py");
    REQUIRE(r.ok());
    ParseDiagnostics d = scan_unsupported(*r.ast);
    REQUIRE(d.unsupported.size() == 1);
    CHECK(d.unsupported[0].kind_name == "DictComp");
  }
  SUBCASE("f-string") {
    ParseResult r = parse_script("msg = f\"value {x}\"\n", "t.py");
    REQUIRE(r.ok());
    ParseDiagnostics d = scan_unsupported(*r.ast);
    REQUIRE(d.unsupported.size() == 1);
    CHECK(d.unsupported[0].kind_name == "JoinedStr");
  }
  SUBCASE("wildcard import") {
    ParseResult r = parse_script("from sklearn import *\n", "t.py");
    REQUIRE(r.ok());
    ParseDiagnostics d = scan_unsupported(*r.ast);
    REQUIRE(d.unsupported.size() == 1);
    CHECK(d.unsupported[0].kind_name == "ImportStar");
  }
  SUBCASE("lambda with assignment in its body") {
    ParseResult r = parse_script("f = lambda v: (t := v) + 1\n", "t.py");
    REQUIRE(r.ok());
    ParseDiagnostics d = scan_unsupported(*r.ast);
    REQUIRE(d.unsupported.size() == 1);
    CHECK(d.unsupported[0].kind_name == "Lambda");
  }
  SUBCASE("plain lambda is fine") {
    ParseResult r = parse_script("f = lambda v: v + 1\n", "t.py");
    REQUIRE(r.ok());
    CHECK(scan_unsupported(*r.ast).unsupported.empty());
  }
  SUBCASE("heart-disease fixture has none") {
    ParseResult r = parse_script(testutil::read_file(testutil::fixture("heart_disease.py")),
                                 "heart_disease.py");
    REQUIRE(r.ok());
    CHECK(scan_unsupported(*r.ast).unsupported.empty());
  }
}

TEST_CASE("docstrings and bare strings are discarded") {
  ParseResult r = parse_script("\"\"\"module doc\"\"\"\nx = 1\n'stray'\n", "t.py");
  REQUIRE(r.ok());
  REQUIRE(r.ast->root.children.size() == 1);
  CHECK(r.ast->root.children[0].kind == NodeKind::Assign);
}

TEST_CASE("comments never reach the tree") {
  ParseResult r = parse_script("# clf.fit(X, y)\nx = 1  # trailing\n", "t.py");
  REQUIRE(r.ok());
  CHECK(find_node(r.ast->root, NodeKind::Call) == nullptr);
}

TEST_CASE("parsing is deterministic across the corpus") {
  for (const auto &path : testutil::corpus_scripts()) {
    std::string source = testutil::read_file(path);
    ParseResult a = parse_script(source, path);
    ParseResult b = parse_script(source, path);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(serialize_ast(*a.ast) == serialize_ast(*b.ast));
  }
}

TEST_CASE("node count is at least the statement count") {
  for (const auto &path : testutil::corpus_scripts()) {
    std::string source = testutil::read_file(path);
    ParseResult r = parse_script(source, path);
    REQUIRE(r.ok());
    CHECK(r.ast->node_count() >= r.ast->root.children.size());
  }
}

TEST_CASE("larger statement forms round-trip through the parser") {
  std::string source =
      "import os, sys\n"
      "a, b = 1, 2\n"
      "a += b\n"
      "c = a if b else 0\n"
      "d = [i for i in range(3)]\n"
      "def helper(x, y=2, *rest, **kw):\n"
      "    return x + y\n"
      "class Box:\n"
      "    pass\n"
      "try:\n"
      "    val = helper(a)\n"
      "except ValueError as e:\n"
      "    val = 0\n"
      "finally:\n"
      "    b = 1\n"
      "with open('f') as fh:\n"
      "    data = fh.read()\n"
      "for i in range(3):\n"
      "    a = a + i\n"
      "while a > 10:\n"
      "    break\n"
      "del d\n"
      "assert a is not None, 'gone'\n"
      "x = {'k': 1, 'j': 2}\n"
      "s = {1, 2, 3}\n"
      "t = (1,)\n"
      "n = -5\n"
      "m = a[1:2:3]\n";
  ParseResult r = parse_script(source, "forms.py");
  REQUIRE(r.ok());
  CHECK(scan_unsupported(*r.ast).unsupported.empty());
}

TEST_CASE("yield works in statement and expression position") {
  ParseResult r = parse_script(
      "def gen():\n"
      "    yield 1\n"
      "    total = yield\n"
      "    x = (yield total)\n",
      "gen.py");
  REQUIRE(r.ok());
  CHECK(scan_unsupported(*r.ast).unsupported.empty());
}

TEST_CASE("try/except around imports is parsed as ordinary statements") {
  std::string source =
      "try:\n"
      "    import lightgbm as lgb\n"
      "except ImportError:\n"
      "    lgb = None\n";
  ParseResult r = parse_script(source, "t.py");
  REQUIRE(r.ok());
  CHECK(find_node(r.ast->root, NodeKind::Import) != nullptr);
}
