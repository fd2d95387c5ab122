#ifndef MLPROV_AST_HPP_
#define MLPROV_AST_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlprov/literal.hpp"

namespace mlprov::py {

// Node kinds the lowering pass consumes directly. Everything else is
// normalized into Other with the grammar kind name preserved.
enum class NodeKind {
  Module,
  Import,
  ImportFrom,
  Assign,
  Call,
  Attribute,
  Name,
  Constant,
  Subscript,
  Slice,
  ExtSlice,
  Index,
  Delete,
  List,
  Tuple,
  Keyword,
  Expr,
  BinOp,
  Other,
};

const char *kind_name(NodeKind k);

struct AstNode {
  NodeKind kind = NodeKind::Other;
  std::string other_kind;             // set when kind == Other
  std::vector<AstNode> children;
  std::optional<Literal> payload;     // literal value (Constant) or identifier text
  int line = 0;

  // Absent slice bound / empty placeholder slot.
  static AstNode absent(int line);
  bool is_absent() const { return kind == NodeKind::Other && other_kind == "Absent"; }

  const std::string &ident() const;   // payload as identifier text
  std::size_t subtree_size() const;
};

struct ScriptAst {
  AstNode root;                       // kind Module
  std::string source_path;
  int line_count = 0;                 // LOC of the source text

  std::size_t node_count() const { return root.subtree_size(); }
};

// Stable structural serialization, used by determinism checks and --dump-ast.
std::string serialize_ast(const ScriptAst &ast);

} // namespace mlprov::py

#endif // MLPROV_AST_HPP_
