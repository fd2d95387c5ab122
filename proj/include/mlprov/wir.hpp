#ifndef MLPROV_WIR_HPP_
#define MLPROV_WIR_HPP_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlprov/errors.hpp"
#include "mlprov/literal.hpp"
#include "mlprov/roles.hpp"

namespace mlprov::wir {

using NodeId = int;

// Variable node of the workflow graph. Names are versioned: re-assignment
// of `x` creates a fresh node so backward walks see the binding that was
// live at each use. Constants are variable nodes without a name.
struct VarNode {
  NodeId id = -1;
  std::optional<std::string> name;
  int version = 1;
  bool is_temp = false;
  int defined_at_line = 0;
  std::optional<Literal> value;             // set for constants
  std::map<Role, Origin> annotations;       // role set; first origin wins

  bool is_constant() const { return value.has_value(); }
  bool has_role(Role r) const { return annotations.count(r) != 0; }
  std::string display_name() const;
};

struct OpNode {
  NodeId id = -1;
  std::string op_name;
  std::optional<std::string> qualifier;     // dotted path as written, e.g. pd.read_csv
  int line = 0;
  // Keyword name -> variable id, in call order. Slice bounds reuse the
  // keys lower/upper/step.
  std::vector<std::pair<std::string, NodeId>> keyword_args;

  std::optional<NodeId> keyword(const std::string &key) const;
};

// One operation invocation: ordered inputs, optional caller, operation,
// ordered outputs. Keyword argument values appear in `inputs` after the
// positional ones.
struct ProvRel {
  std::vector<NodeId> inputs;
  std::optional<NodeId> caller;
  NodeId op = -1;
  std::vector<NodeId> outputs;
};

enum class EdgeType { Input, Caller, Output };
const char *edge_type_name(EdgeType t);

struct Edge {
  NodeId from = -1;
  NodeId to = -1;
  EdgeType type = EdgeType::Input;

  auto operator<=>(const Edge &) const = default;
};

enum class Direction { Incoming, Outgoing };

// Output of PR generation, before graph composition.
struct PrProgram {
  std::vector<VarNode> vars;
  std::vector<OpNode> ops;
  std::vector<ProvRel> prs;    // script order
};

struct Wir {
  std::vector<VarNode> vars;
  std::vector<OpNode> ops;
  std::vector<Edge> edges;     // deduplicated, first-seen order
  std::vector<ProvRel> prs;

  // Composition-time indexes.
  std::map<NodeId, std::size_t> var_slot;
  std::map<NodeId, std::size_t> op_slot;
  std::map<NodeId, std::vector<std::pair<EdgeType, NodeId>>> succ;   // outgoing, PR order
  std::map<NodeId, std::vector<std::pair<EdgeType, NodeId>>> pred;   // incoming, PR order
  std::map<NodeId, int> producer;   // variable id -> index of the PR that outputs it

  bool is_var(NodeId id) const { return var_slot.count(id) != 0; }
  bool is_op(NodeId id) const { return op_slot.count(id) != 0; }
  VarNode &var(NodeId id);
  const VarNode &var(NodeId id) const;
  OpNode &op(NodeId id);
  const OpNode &op(NodeId id) const;
  const ProvRel *producing_pr(NodeId var_id) const;
  std::size_t edge_count() const { return edges.size(); }
};

// Builds the bipartite graph from generated PRs and verifies the
// structural invariants (bipartiteness, edge reconstruction, single
// producer per variable, unique temp names).
Wir compose(PrProgram program);

// Adjacent node ids filtered by edge type and direction; input lists
// preserve argument order. Throws UnknownNodeError for ids not in `w`.
std::vector<NodeId> neighbors(const Wir &w, NodeId id, std::optional<EdgeType> type,
                              Direction direction);

// Stable JSON serialization (vars / ops / edges / prs).
std::string serialize_wir(const Wir &w);

} // namespace mlprov::wir

#endif // MLPROV_WIR_HPP_
