#ifndef MLPROV_PARSER_HPP_
#define MLPROV_PARSER_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlprov/ast.hpp"

namespace mlprov::py {

struct ParseError {
  std::string message;
  int line = 0;
  int col = 0;
  bool encoding = false;   // invalid UTF-8 input
};

struct ParseResult {
  std::optional<ScriptAst> ast;
  std::optional<ParseError> error;
  bool ok() const { return ast.has_value(); }
};

// Parses Python 3 source text into the normalized AST. Comments and
// docstrings are discarded. The first syntax error aborts the parse.
ParseResult parse_script(const std::string &source, const std::string &path);

struct UnsupportedNode {
  std::string kind_name;   // DictComp, SetComp, JoinedStr, Lambda, ImportStar
  int line = 0;
};

struct ParseDiagnostics {
  bool syntax_ok = true;
  std::vector<UnsupportedNode> unsupported;
  bool python3_compatible = true;
};

// Lists the declared-unsupported constructs present in a parsed script.
// Lowering later skips the statements that contain them.
ParseDiagnostics scan_unsupported(const ScriptAst &ast);

// True when the subtree contains a construct from the unsupported set.
bool has_unsupported(const AstNode &node);

} // namespace mlprov::py

#endif // MLPROV_PARSER_HPP_
