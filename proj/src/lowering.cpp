#include "mlprov/lowering.hpp"

#include <map>
#include <optional>
#include <string>

#include "mlprov/parser.hpp"

namespace mlprov::wir {

using py::AstNode;
using py::NodeKind;

namespace {

// Dotted path text for Name / Attribute chains ("pd.read_csv"), nullopt
// when the chain contains anything else.
std::optional<std::string> dotted_path(const AstNode &n) {
  if (n.kind == NodeKind::Name) return n.ident();
  if (n.kind == NodeKind::Attribute && n.children.size() == 1) {
    auto base = dotted_path(n.children[0]);
    if (!base) return std::nullopt;
    return *base + "." + n.ident();
  }
  return std::nullopt;
}

class Lowerer {
public:
  PrProgram run(const py::ScriptAst &ast) {
    lower_body(ast.root.children);
    return std::move(prog_);
  }

private:
  // ---- node factories ----
  NodeId fresh_id() { return next_id_++; }

  NodeId make_var(std::optional<std::string> name, int version, bool is_temp, int line,
                  std::optional<Literal> value = std::nullopt) {
    VarNode v;
    v.id = fresh_id();
    v.name = std::move(name);
    v.version = version;
    v.is_temp = is_temp;
    v.defined_at_line = line;
    v.value = std::move(value);
    prog_.vars.push_back(std::move(v));
    return prog_.vars.back().id;
  }

  NodeId make_const(const Literal &value, int line) {
    return make_var(std::nullopt, 1, false, line, value);
  }

  NodeId make_temp(const std::string &op_name, int line) {
    int n = ++temp_counter_[op_name];
    std::string name = "tmp_" + op_name;
    if (n > 1) name += "_" + std::to_string(n);
    return make_var(name, 1, true, line);
  }

  NodeId make_op(const std::string &op_name, std::optional<std::string> qualifier, int line) {
    OpNode o;
    o.id = fresh_id();
    o.op_name = op_name;
    o.qualifier = std::move(qualifier);
    o.line = line;
    prog_.ops.push_back(std::move(o));
    return prog_.ops.back().id;
  }

  OpNode &op_ref(NodeId id) {
    for (auto &o : prog_.ops)
      if (o.id == id) return o;
    throw LoweringError("OpNode", 0, "bad op id");
  }

  void add_pr(std::vector<NodeId> inputs, std::optional<NodeId> caller, NodeId op,
              std::vector<NodeId> outputs) {
    prog_.prs.push_back(ProvRel{std::move(inputs), caller, op, std::move(outputs)});
  }

  // ---- name environment ----
  NodeId read_name(const std::string &name, int line) {
    auto it = env_.find(name);
    if (it != env_.end()) return it->second;
    NodeId id = make_var(name, ++version_[name], false, line);
    env_[name] = id;
    return id;
  }

  // Re-assignment creates a fresh version; later reads bind to it.
  NodeId bind_name(const std::string &name, int line) {
    NodeId id = make_var(name, ++version_[name], false, line);
    env_[name] = id;
    return id;
  }

  // ---- statements ----
  void lower_body(const std::vector<AstNode> &stmts) {
    for (const auto &s : stmts) {
      if (py::has_unsupported(s)) continue;   // statement-level skipping
      lower_statement(s);
    }
  }

  void lower_statement(const AstNode &n) {
    switch (n.kind) {
      case NodeKind::Import: return lower_import(n);
      case NodeKind::ImportFrom: return lower_import_from(n);
      case NodeKind::Assign: return lower_assign(n);
      case NodeKind::Delete: return lower_delete(n);
      case NodeKind::Expr:
        if (!n.children.empty()) lower_expr(n.children[0]);
        return;
      case NodeKind::Other: return lower_other_statement(n);
      default:
        // Expression used in statement position.
        lower_expr(n);
        return;
    }
  }

  void lower_import(const AstNode &n) {
    const std::string &module = n.ident();
    std::string root = module.substr(0, module.find('.'));
    std::string bound = n.children.empty() ? root : n.children[0].ident();
    NodeId op = make_op("Import", module, n.line);
    add_pr({}, std::nullopt, op, {bind_name(bound, n.line)});
  }

  void lower_import_from(const AstNode &n) {
    NodeId op = make_op("ImportFrom", n.ident(), n.line);
    std::vector<NodeId> outs;
    for (const auto &c : n.children) {
      if (c.kind == NodeKind::Name) {
        outs.push_back(bind_name(c.ident(), n.line));
      } else if (c.kind == NodeKind::Keyword) {
        outs.push_back(bind_name(c.ident(), n.line));
      }
    }
    if (outs.empty()) outs.push_back(make_temp("ImportFrom", n.line));
    add_pr({}, std::nullopt, op, std::move(outs));
  }

  void lower_assign(const AstNode &n) {
    if (n.children.size() < 2) throw LoweringError("Assign", n.line, "missing value");
    const AstNode &value = n.children.back();

    // Tuple unpacking of a call maps the call's ordered outputs onto the
    // targets positionally.
    if (n.children.size() == 2 && n.children[0].kind == NodeKind::Tuple &&
        value.kind == NodeKind::Call) {
      const AstNode &tup = n.children[0];
      bool all_names = true;
      for (const auto &t : tup.children)
        if (t.kind != NodeKind::Name) all_names = false;
      if (all_names && !tup.children.empty()) {
        lower_call(value, &tup);
        return;
      }
    }

    // Pairwise tuple-to-tuple assignment.
    if (n.children.size() == 2 && n.children[0].kind == NodeKind::Tuple &&
        value.kind == NodeKind::Tuple &&
        n.children[0].children.size() == value.children.size()) {
      std::vector<NodeId> vals;
      for (const auto &v : value.children) vals.push_back(lower_expr(v));
      for (std::size_t i = 0; i < vals.size(); ++i)
        assign_single(n.children[0].children[i], vals[i], n.line);
      return;
    }

    NodeId v = lower_expr(value);
    for (std::size_t i = 0; i + 1 < n.children.size(); ++i)
      assign_single(n.children[i], v, n.line);
  }

  void assign_single(const AstNode &target, NodeId value, int line) {
    switch (target.kind) {
      case NodeKind::Name: {
        NodeId op = make_op("Assign", std::nullopt, line);
        add_pr({value}, std::nullopt, op, {bind_name(target.ident(), line)});
        return;
      }
      case NodeKind::Tuple: {
        NodeId op = make_op("Assign", std::nullopt, line);
        std::vector<NodeId> outs;
        for (const auto &t : target.children) {
          const AstNode &te = (t.kind == NodeKind::Other && t.other_kind == "Starred" &&
                               !t.children.empty())
                                  ? t.children[0]
                                  : t;
          if (te.kind == NodeKind::Name) {
            outs.push_back(bind_name(te.ident(), line));
          } else {
            outs.push_back(make_temp("Assign", line));
          }
        }
        if (outs.empty()) outs.push_back(make_temp("Assign", line));
        add_pr({value}, std::nullopt, op, std::move(outs));
        return;
      }
      case NodeKind::Subscript: {
        // df['new'] = v mutates the subscripted object.
        NodeId slice = lower_slice(target.children[1]);
        NodeId receiver = lower_expr(target.children[0]);
        NodeId op = make_op("SubscriptAssign", std::nullopt, line);
        NodeId out = (target.children[0].kind == NodeKind::Name)
                         ? bind_name(target.children[0].ident(), line)
                         : make_temp("SubscriptAssign", line);
        add_pr({slice, value}, receiver, op, {out});
        return;
      }
      case NodeKind::Attribute: {
        NodeId receiver = lower_expr(target.children[0]);
        NodeId op = make_op("AttributeAssign", std::nullopt, line);
        NodeId out = (target.children[0].kind == NodeKind::Name)
                         ? bind_name(target.children[0].ident(), line)
                         : make_temp("AttributeAssign", line);
        add_pr({value}, receiver, op, {out});
        return;
      }
      default: {
        NodeId op = make_op("Assign", std::nullopt, line);
        add_pr({value}, std::nullopt, op, {make_temp("Assign", line)});
        return;
      }
    }
  }

  void lower_delete(const AstNode &n) {
    for (const auto &target : n.children) {
      if (target.kind == NodeKind::Subscript) {
        NodeId slice = lower_slice(target.children[1]);
        NodeId receiver = lower_expr(target.children[0]);
        NodeId op = make_op("Delete", std::nullopt, n.line);
        add_pr({slice}, receiver, op, {make_temp("Delete", n.line)});
      } else if (target.kind == NodeKind::Name) {
        NodeId v = read_name(target.ident(), n.line);
        NodeId op = make_op("Delete", std::nullopt, n.line);
        add_pr({v}, std::nullopt, op, {make_temp("Delete", n.line)});
        env_.erase(target.ident());
      } else if (target.kind == NodeKind::Attribute) {
        NodeId receiver = lower_expr(target.children[0]);
        NodeId op = make_op("Delete", std::nullopt, n.line);
        add_pr({}, receiver, op, {make_temp("Delete", n.line)});
      }
    }
  }

  void lower_other_statement(const AstNode &n) {
    const std::string &k = n.other_kind;
    if (k == "If" || k == "While") {
      lower_expr(n.children[0]);
      for (std::size_t i = 1; i < n.children.size(); ++i) lower_block(n.children[i]);
      return;
    }
    if (k == "For") {
      NodeId iter = lower_expr(n.children[1]);
      NodeId op = make_op("For", std::nullopt, n.line);
      std::vector<NodeId> outs;
      const AstNode &target = n.children[0];
      if (target.kind == NodeKind::Name) {
        outs.push_back(bind_name(target.ident(), n.line));
      } else if (target.kind == NodeKind::Tuple) {
        for (const auto &t : target.children)
          if (t.kind == NodeKind::Name) outs.push_back(bind_name(t.ident(), n.line));
      }
      if (outs.empty()) outs.push_back(make_temp("For", n.line));
      add_pr({iter}, std::nullopt, op, std::move(outs));
      for (std::size_t i = 2; i < n.children.size(); ++i) lower_block(n.children[i]);
      return;
    }
    if (k == "Try") {
      for (const auto &c : n.children) lower_block(c);
      return;
    }
    if (k == "With") {
      for (const auto &c : n.children) {
        if (c.kind == NodeKind::Other && c.other_kind == "WithItem") {
          NodeId v = lower_expr(c.children[0]);
          if (c.children.size() > 1 && c.children[1].kind == NodeKind::Name) {
            NodeId op = make_op("With", std::nullopt, c.line);
            add_pr({v}, std::nullopt, op, {bind_name(c.children[1].ident(), c.line)});
          }
        } else {
          lower_block(c);
        }
      }
      return;
    }
    if (k == "FunctionDef") {
      NodeId op = make_op("FunctionDef", std::nullopt, n.line);
      add_pr({}, std::nullopt, op, {bind_name(n.ident(), n.line)});
      // Body statements are lowered per-definition; bindings made inside
      // the definition do not leak into the script scope.
      auto saved_env = env_;
      for (const auto &p : n.children[0].children)
        if (p.kind == NodeKind::Name) bind_name(p.ident(), n.line);
      if (n.children.size() > 1) lower_block(n.children[1]);
      env_ = std::move(saved_env);
      return;
    }
    if (k == "ClassDef") {
      NodeId op = make_op("ClassDef", std::nullopt, n.line);
      add_pr({}, std::nullopt, op, {bind_name(n.ident(), n.line)});
      return;
    }
    if (k == "Return" || k == "Raise" || k == "Assert") {
      for (const auto &c : n.children) lower_expr(c);
      return;
    }
    // Pass, Break, Continue, Scope and friends carry no dataflow.
  }

  void lower_block(const AstNode &body) {
    if (body.kind == NodeKind::Other && body.other_kind == "Body") {
      lower_body(body.children);
    }
  }

  // ---- expressions ----
  NodeId lower_expr(const AstNode &n) {
    switch (n.kind) {
      case NodeKind::Name:
        return read_name(n.ident(), n.line);
      case NodeKind::Constant:
        if (!n.payload) throw LoweringError("Constant", n.line, "constant without payload");
        return make_const(*n.payload, n.line);
      case NodeKind::Call:
        return lower_call(n, nullptr);
      case NodeKind::Attribute: {
        NodeId receiver = lower_expr(n.children[0]);
        NodeId op = make_op(n.ident(), dotted_path(n), n.line);
        NodeId out = make_temp(n.ident(), n.line);
        add_pr({}, receiver, op, {out});
        return out;
      }
      case NodeKind::Subscript: {
        NodeId slice = lower_slice(n.children[1]);
        NodeId receiver = lower_expr(n.children[0]);
        NodeId op = make_op("Subscript", std::nullopt, n.line);
        NodeId out = make_temp("Subscript", n.line);
        add_pr({slice}, receiver, op, {out});
        return out;
      }
      case NodeKind::List:
      case NodeKind::Tuple: {
        std::vector<NodeId> elems;
        for (const auto &c : n.children) elems.push_back(lower_expr(c));
        const char *name = n.kind == NodeKind::List ? "List" : "Tuple";
        NodeId op = make_op(name, std::nullopt, n.line);
        NodeId out = make_temp(name, n.line);
        add_pr(std::move(elems), std::nullopt, op, {out});
        return out;
      }
      case NodeKind::BinOp: {
        NodeId lhs = lower_expr(n.children[0]);
        NodeId rhs = lower_expr(n.children[1]);
        NodeId op = make_op("BinOp", n.payload ? std::optional<std::string>(literal_repr(*n.payload))
                                               : std::nullopt,
                            n.line);
        NodeId out = make_temp("BinOp", n.line);
        add_pr({lhs, rhs}, std::nullopt, op, {out});
        return out;
      }
      case NodeKind::Keyword:
        return lower_expr(n.children[0]);
      case NodeKind::Other:
        return lower_other_expr(n);
      default:
        throw LoweringError(py::kind_name(n.kind), n.line, "unexpected node in expression");
    }
  }

  NodeId lower_other_expr(const AstNode &n) {
    const std::string &k = n.other_kind;
    if (k == "Starred") return lower_expr(n.children[0]);
    if (k == "NamedExpr") {
      NodeId v = lower_expr(n.children[1]);
      NodeId op = make_op("Assign", std::nullopt, n.line);
      NodeId out = bind_name(n.children[0].ident(), n.line);
      add_pr({v}, std::nullopt, op, {out});
      return out;
    }
    if (k == "BoolOp" || k == "Compare" || k == "UnaryOp" || k == "IfExp" || k == "Dict" ||
        k == "Set" || k == "Yield") {
      std::vector<NodeId> inputs;
      for (const auto &c : n.children) inputs.push_back(lower_expr(c));
      NodeId op = make_op(k, std::nullopt, n.line);
      NodeId out = make_temp(k, n.line);
      add_pr(std::move(inputs), std::nullopt, op, {out});
      return out;
    }
    if (k == "ListComp" || k == "GeneratorExp") {
      // Only the iterated sources matter for dataflow; the element
      // expression and comprehension-local targets stay opaque.
      std::vector<NodeId> inputs;
      for (std::size_t i = 1; i + 1 < n.children.size(); i += 2)
        inputs.push_back(lower_expr(n.children[i + 1]));
      NodeId op = make_op(k, std::nullopt, n.line);
      NodeId out = make_temp(k, n.line);
      add_pr(std::move(inputs), std::nullopt, op, {out});
      return out;
    }
    // Lambda, Ellipsis and any leftover construct become an inert
    // operation with a temporary output.
    NodeId op = make_op(k, std::nullopt, n.line);
    NodeId out = make_temp(k, n.line);
    add_pr({}, std::nullopt, op, {out});
    return out;
  }

  NodeId lower_slice(const AstNode &n) {
    switch (n.kind) {
      case NodeKind::Index: {
        NodeId v = lower_expr(n.children[0]);
        NodeId op = make_op("Index", std::nullopt, n.line);
        NodeId out = make_temp("Index", n.line);
        add_pr({v}, std::nullopt, op, {out});
        return out;
      }
      case NodeKind::Slice: {
        static const char *slot_names[3] = {"lower", "upper", "step"};
        NodeId op = make_op("Slice", std::nullopt, n.line);
        std::vector<NodeId> inputs;
        for (std::size_t i = 0; i < n.children.size() && i < 3; ++i) {
          if (n.children[i].is_absent()) continue;
          NodeId v = lower_expr(n.children[i]);
          inputs.push_back(v);
          op_ref(op).keyword_args.push_back({slot_names[i], v});
        }
        NodeId out = make_temp("Slice", n.line);
        add_pr(std::move(inputs), std::nullopt, op, {out});
        return out;
      }
      case NodeKind::ExtSlice: {
        std::vector<NodeId> comps;
        for (const auto &c : n.children) comps.push_back(lower_slice(c));
        NodeId op = make_op("ExtSlice", std::nullopt, n.line);
        NodeId out = make_temp("ExtSlice", n.line);
        add_pr(std::move(comps), std::nullopt, op, {out});
        return out;
      }
      default:
        return lower_expr(n);
    }
  }

  // Call lowering. `unpack` carries tuple-assignment targets so the call's
  // ordered outputs map onto them positionally.
  NodeId lower_call(const AstNode &n, const AstNode *unpack) {
    const AstNode &func = n.children[0];
    std::optional<std::string> qualifier = dotted_path(func);

    // Inputs are lowered before the caller, outputs last.
    std::vector<NodeId> inputs;
    std::vector<std::pair<std::string, NodeId>> keywords;
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      const AstNode &arg = n.children[i];
      if (arg.kind == NodeKind::Keyword) {
        NodeId v = lower_expr(arg.children[0]);
        keywords.push_back({arg.ident(), v});
      } else {
        inputs.push_back(lower_expr(arg));
      }
    }
    // Keyword values follow the positional inputs in I and are also
    // recorded by name on the operation node.
    for (const auto &[key, v] : keywords) inputs.push_back(v);

    std::string op_name;
    std::optional<NodeId> caller;
    if (func.kind == NodeKind::Name) {
      op_name = func.ident();
      caller = read_name(func.ident(), func.line);
    } else if (func.kind == NodeKind::Attribute) {
      op_name = func.ident();
      caller = lower_expr(func.children[0]);
    } else {
      op_name = "Call";
      caller = lower_expr(func);
    }

    NodeId op = make_op(op_name, qualifier, n.line);
    for (const auto &kv : keywords) op_ref(op).keyword_args.push_back(kv);

    std::vector<NodeId> outputs;
    if (unpack) {
      for (const auto &t : unpack->children) outputs.push_back(bind_name(t.ident(), n.line));
    } else {
      outputs.push_back(make_temp(op_name, n.line));
    }
    NodeId first_out = outputs.front();
    add_pr(std::move(inputs), caller, op, std::move(outputs));
    return first_out;
  }

  PrProgram prog_;
  int next_id_ = 0;
  std::map<std::string, NodeId> env_;
  std::map<std::string, int> version_;
  std::map<std::string, int> temp_counter_;
};

} // namespace

PrProgram gen_prs(const py::ScriptAst &ast) { return Lowerer().run(ast); }

Wir gen_wir(const py::ScriptAst &ast) { return compose(gen_prs(ast)); }

} // namespace mlprov::wir
