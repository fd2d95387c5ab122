#include "mlprov/wir.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace mlprov::wir {

using ordered_json = nlohmann::ordered_json;

const char *edge_type_name(EdgeType t) {
  switch (t) {
    case EdgeType::Input: return "input_edge";
    case EdgeType::Caller: return "caller_edge";
    case EdgeType::Output: return "output_edge";
  }
  return "input_edge";
}

std::string VarNode::display_name() const {
  if (name) return *name;
  if (value) return literal_repr(*value);
  return "<anon>";
}

std::optional<NodeId> OpNode::keyword(const std::string &key) const {
  for (const auto &[k, v] : keyword_args)
    if (k == key) return v;
  return std::nullopt;
}

VarNode &Wir::var(NodeId id) {
  auto it = var_slot.find(id);
  if (it == var_slot.end()) throw UnknownNodeError(id);
  return vars[it->second];
}
const VarNode &Wir::var(NodeId id) const { return const_cast<Wir *>(this)->var(id); }

OpNode &Wir::op(NodeId id) {
  auto it = op_slot.find(id);
  if (it == op_slot.end()) throw UnknownNodeError(id);
  return ops[it->second];
}
const OpNode &Wir::op(NodeId id) const { return const_cast<Wir *>(this)->op(id); }

const ProvRel *Wir::producing_pr(NodeId var_id) const {
  auto it = producer.find(var_id);
  if (it == producer.end()) return nullptr;
  return &prs[it->second];
}

namespace {

std::set<Edge> edges_from_prs(const std::vector<ProvRel> &prs) {
  std::set<Edge> out;
  for (const auto &pr : prs) {
    for (NodeId v : pr.inputs) out.insert(Edge{v, pr.op, EdgeType::Input});
    if (pr.caller) out.insert(Edge{*pr.caller, pr.op, EdgeType::Caller});
    for (NodeId v : pr.outputs) out.insert(Edge{pr.op, v, EdgeType::Output});
  }
  return out;
}

} // namespace

Wir compose(PrProgram program) {
  Wir w;
  w.vars = std::move(program.vars);
  w.ops = std::move(program.ops);
  w.prs = std::move(program.prs);

  for (std::size_t i = 0; i < w.vars.size(); ++i) w.var_slot[w.vars[i].id] = i;
  for (std::size_t i = 0; i < w.ops.size(); ++i) w.op_slot[w.ops[i].id] = i;

  std::set<Edge> seen;
  auto add_edge = [&](NodeId from, NodeId to, EdgeType type) {
    Edge e{from, to, type};
    if (seen.insert(e).second) w.edges.push_back(e);
  };

  for (std::size_t pi = 0; pi < w.prs.size(); ++pi) {
    const ProvRel &pr = w.prs[pi];
    const OpNode &op = w.op(pr.op);
    if (op.op_name.empty()) throw LoweringError("OpNode", op.line, "empty op_name");
    if (pr.outputs.empty()) throw LoweringError(op.op_name, op.line, "PR without outputs");
    for (NodeId v : pr.inputs) {
      if (!w.is_var(v)) throw LoweringError(op.op_name, op.line, "input is not a variable");
      add_edge(v, pr.op, EdgeType::Input);
      w.succ[v].push_back({EdgeType::Input, pr.op});
      w.pred[pr.op].push_back({EdgeType::Input, v});
    }
    if (pr.caller) {
      if (!w.is_var(*pr.caller)) throw LoweringError(op.op_name, op.line, "caller is not a variable");
      add_edge(*pr.caller, pr.op, EdgeType::Caller);
      w.succ[*pr.caller].push_back({EdgeType::Caller, pr.op});
      w.pred[pr.op].push_back({EdgeType::Caller, *pr.caller});
    }
    for (NodeId v : pr.outputs) {
      if (!w.is_var(v)) throw LoweringError(op.op_name, op.line, "output is not a variable");
      auto [it, fresh] = w.producer.insert({v, static_cast<int>(pi)});
      if (!fresh) throw LoweringError(op.op_name, op.line, "variable produced twice");
      add_edge(pr.op, v, EdgeType::Output);
      w.succ[pr.op].push_back({EdgeType::Output, v});
      w.pred[v].push_back({EdgeType::Output, pr.op});
    }
  }

  // Cross-check: the stored edge set must be exactly the set induced by
  // the PRs, and every edge must connect a variable with an operation.
  std::set<Edge> reconstructed = edges_from_prs(w.prs);
  std::set<Edge> stored(w.edges.begin(), w.edges.end());
  if (stored != reconstructed)
    throw LoweringError("Wir", 0, "edge set does not match the PR-induced set");
  for (const Edge &e : w.edges) {
    bool ok = (e.type == EdgeType::Output) ? (w.is_op(e.from) && w.is_var(e.to))
                                           : (w.is_var(e.from) && w.is_op(e.to));
    if (!ok) throw LoweringError("Wir", 0, "edge violates bipartiteness");
  }

  std::set<std::string> temp_names;
  for (const auto &v : w.vars) {
    if (v.is_temp && v.name && !temp_names.insert(*v.name).second)
      throw LoweringError("VarNode", v.defined_at_line, "duplicate temp name " + *v.name);
  }
  return w;
}

std::vector<NodeId> neighbors(const Wir &w, NodeId id, std::optional<EdgeType> type,
                              Direction direction) {
  if (!w.is_var(id) && !w.is_op(id)) throw UnknownNodeError(id);
  const auto &adj = (direction == Direction::Outgoing) ? w.succ : w.pred;
  auto it = adj.find(id);
  std::vector<NodeId> out;
  if (it == adj.end()) return out;
  std::set<NodeId> dedup;
  for (const auto &[etype, other] : it->second) {
    if (type && etype != *type) continue;
    if (dedup.insert(other).second) out.push_back(other);
  }
  return out;
}

std::string serialize_wir(const Wir &w) {
  ordered_json j;
  j["vars"] = ordered_json::array();
  for (const auto &v : w.vars) {
    ordered_json jv;
    jv["id"] = v.id;
    if (v.name) {
      jv["name"] = *v.name;
    } else {
      jv["name"] = nullptr;
    }
    jv["version"] = v.version;
    jv["is_temp"] = v.is_temp;
    jv["defined_at_line"] = v.defined_at_line;
    if (v.value) jv["value"] = literal_repr(*v.value);
    ordered_json anns = ordered_json::array();
    for (const auto &[role, origin] : v.annotations) {
      anns.push_back({{"role", role_name(role)}, {"origin", origin_name(origin)}});
    }
    jv["annotations"] = std::move(anns);
    j["vars"].push_back(std::move(jv));
  }
  j["ops"] = ordered_json::array();
  for (const auto &o : w.ops) {
    ordered_json jo;
    jo["id"] = o.id;
    jo["op_name"] = o.op_name;
    if (o.qualifier) {
      jo["qualifier"] = *o.qualifier;
    } else {
      jo["qualifier"] = nullptr;
    }
    jo["line"] = o.line;
    ordered_json kw = ordered_json::object();
    for (const auto &[k, v] : o.keyword_args) kw[k] = v;
    jo["keyword_args"] = std::move(kw);
    j["ops"].push_back(std::move(jo));
  }
  j["edges"] = ordered_json::array();
  for (const auto &e : w.edges) {
    j["edges"].push_back(
        {{"from", e.from}, {"to", e.to}, {"edge_type", edge_type_name(e.type)}});
  }
  j["prs"] = ordered_json::array();
  for (const auto &pr : w.prs) {
    ordered_json jp;
    jp["inputs"] = pr.inputs;
    if (pr.caller) {
      jp["caller"] = *pr.caller;
    } else {
      jp["caller"] = nullptr;
    }
    jp["op"] = pr.op;
    jp["outputs"] = pr.outputs;
    j["prs"].push_back(std::move(jp));
  }
  return j.dump(2);
}

} // namespace mlprov::wir
