#include "mlprov/annotate.hpp"

#include <algorithm>

#include <json.hpp>

namespace mlprov::annotate {

using wir::Edge;
using wir::EdgeType;
using wir::NodeId;
using wir::OpNode;
using wir::ProvRel;
using wir::VarNode;
using wir::Wir;

namespace {

std::pair<std::string, std::string> split_library(const std::string &qualifier) {
  std::string path = qualifier;
  while (!path.empty() && path.front() == '.') path.erase(path.begin());
  auto dot = path.find('.');
  if (dot == std::string::npos) return {path, ""};
  return {path.substr(0, dot), path.substr(dot + 1)};
}

std::vector<std::string> split_dotted(const std::string &text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto dot = text.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, dot - start));
    start = dot + 1;
  }
  return parts;
}

// Positional inputs are the ones not bound to a keyword.
std::vector<NodeId> positional_inputs(const Wir &w, const ProvRel &pr) {
  const OpNode &op = w.op(pr.op);
  std::set<NodeId> kw_values;
  for (const auto &[k, v] : op.keyword_args) kw_values.insert(v);
  std::vector<NodeId> out;
  for (NodeId v : pr.inputs)
    if (!kw_values.count(v)) out.push_back(v);
  return out;
}

class Annotator {
public:
  Annotator(Wir w, const kb::KnowledgeBase &kb) : kb_(kb) {
    aw_.wir = std::move(w);
    for (int i = 0; i < static_cast<int>(aw_.wir.prs.size()); ++i)
      pr_of_op_[aw_.wir.prs[i].op] = i;
  }

  AnnotatedWir run() {
    collect_bindings();
    seeds_ = collect_import_seeds(aw_.wir);
    const int cap = std::max<std::size_t>(1, aw_.wir.vars.size());
    std::vector<NodeId> queued;
    while (true) {
      if (aw_.stats.iterations >= cap) {
        aw_.stats.iteration_cap_hit = true;
        break;
      }
      ++aw_.stats.iterations;
      gained_this_iteration_ = 0;
      std::vector<NodeId> gained_vars;
      gained_vars_ = &gained_vars;
      for (const auto &seed : seeds_) forward_dfs(seed);
      for (NodeId v : queued) backward_dfs(v);
      gained_vars_ = nullptr;
      if (gained_this_iteration_ == 0) break;
      queued = std::move(gained_vars);
    }
    derive_train_datasets();
    return std::move(aw_);
  }

private:
  void collect_bindings() {
    for (const auto &pr : aw_.wir.prs) {
      const OpNode &op = aw_.wir.op(pr.op);
      if (op.op_name == "Import") {
        auto [lib, rest] = split_library(op.qualifier.value_or(""));
        for (NodeId out : pr.outputs) {
          const VarNode &v = aw_.wir.var(out);
          if (!v.name) continue;
          bool aliased = (*v.name != lib);
          aw_.import_bindings[*v.name] = LibraryRef{lib, aliased ? rest : ""};
        }
      } else if (op.op_name == "ImportFrom") {
        auto [lib, rest] = split_library(op.qualifier.value_or(""));
        for (NodeId out : pr.outputs) {
          const VarNode &v = aw_.wir.var(out);
          if (v.name) aw_.import_bindings[*v.name] = LibraryRef{lib, rest};
        }
      }
    }
  }

  bool assign_role(NodeId var_id, Role role, Origin origin) {
    VarNode &v = aw_.wir.var(var_id);
    auto [it, fresh] = v.annotations.insert({role, origin});
    if (!fresh) return false;
    ++aw_.stats.annotations_assigned;
    ++gained_this_iteration_;
    if (gained_vars_ && needs_requeue(var_id)) gained_vars_->push_back(var_id);
    return true;
  }

  // A gain made inside a backward DFS only needs another pass when the
  // walk already went past the variable's producer; otherwise the running
  // DFS is still going to traverse it.
  bool needs_requeue(NodeId var_id) const {
    if (!current_backward_visited_) return true;
    auto it = aw_.wir.pred.find(var_id);
    if (it == aw_.wir.pred.end()) return false;
    for (const auto &[etype, other] : it->second) {
      if (current_backward_visited_->count(Edge{other, var_id, etype})) return true;
      if (current_backward_processed_ && current_backward_processed_->count(other)) return true;
    }
    return false;
  }

  std::set<Role> roles_of(NodeId var_id) const {
    std::set<Role> out;
    for (const auto &[r, o] : aw_.wir.var(var_id).annotations) out.insert(r);
    return out;
  }

  // ---- traversals ----
  void forward_dfs(const ImportSeed &seed) {
    ++aw_.stats.forward_traversals;
    std::set<Edge> visited;
    std::vector<NodeId> stack;
    const ProvRel &seed_pr = aw_.wir.prs[seed.pr_index];
    stack.push_back(seed_pr.op);
    std::set<NodeId> processed_ops;
    while (!stack.empty()) {
      NodeId node = stack.back();
      stack.pop_back();
      if (aw_.wir.is_op(node) && processed_ops.insert(node).second)
        process_pr_forward(pr_of_op_.at(node), seed);
      auto it = aw_.wir.succ.find(node);
      if (it == aw_.wir.succ.end()) continue;
      for (const auto &[etype, other] : it->second) {
        if (!visited.insert(Edge{node, other, etype}).second) continue;
        stack.push_back(other);
      }
    }
    aw_.stats.max_edges_visited = std::max(aw_.stats.max_edges_visited, visited.size());
  }

  void backward_dfs(NodeId start_var) {
    ++aw_.stats.backward_traversals;
    std::set<Edge> visited;
    const std::set<Edge> *saved = current_backward_visited_;
    const std::set<NodeId> *saved_ops = current_backward_processed_;
    current_backward_visited_ = &visited;
    std::vector<NodeId> stack{start_var};
    std::set<NodeId> processed_ops;
    current_backward_processed_ = &processed_ops;
    while (!stack.empty()) {
      NodeId node = stack.back();
      stack.pop_back();
      if (aw_.wir.is_op(node) && processed_ops.insert(node).second)
        process_pr_backward(pr_of_op_.at(node));
      auto it = aw_.wir.pred.find(node);
      if (it == aw_.wir.pred.end()) continue;
      for (const auto &[etype, other] : it->second) {
        if (!visited.insert(Edge{other, node, etype}).second) continue;
        stack.push_back(other);
      }
    }
    current_backward_visited_ = saved;
    current_backward_processed_ = saved_ops;
    aw_.stats.max_edges_visited = std::max(aw_.stats.max_edges_visited, visited.size());
  }

  // Identity propagation for plain assignment. The dataframe and
  // train-dataset roles mark the producing expression itself and stay on
  // the operation's direct output rather than spreading to every alias.
  void propagate_assign(const ProvRel &pr, bool forward) {
    const auto &from_ids = forward ? pr.inputs : pr.outputs;
    const auto &to_ids = forward ? pr.outputs : pr.inputs;
    std::set<Role> roles;
    for (NodeId v : from_ids)
      for (Role r : roles_of(v)) roles.insert(r);
    roles.erase(Role::Dataframe);
    roles.erase(Role::TrainDataset);
    for (NodeId to : to_ids)
      for (Role r : roles)
        assign_role(to, r, forward ? Origin::KbForward : Origin::KbBackward);
  }

  void process_pr_forward(int pr_index, const ImportSeed &seed) {
    const ProvRel &pr = aw_.wir.prs[pr_index];
    const OpNode &op = aw_.wir.op(pr.op);
    if (op.op_name == "Assign") {
      propagate_assign(pr, /*forward=*/true);
      return;
    }
    // Skip API queries for operations that resolve to a different library
    // than the seed being propagated; when they resolve to the same
    // library, the resolved module (from the call path) is the more
    // precise one to query with.
    std::optional<std::string> module;
    if (!seed.module.empty()) module = seed.module;
    if (auto ref = resolve_call_library(aw_, op)) {
      if (ref->library != seed.library) return;
      module = ref->module.empty() ? std::nullopt : std::optional(ref->module);
    }
    std::set<Role> caller_roles;
    if (pr.caller) caller_roles = roles_of(*pr.caller);
    const kb::KbFact *fact =
        kb::query_api(kb_, seed.library, module, caller_roles, op.op_name);
    if (!fact) return;

    std::vector<NodeId> gained_inputs;
    apply_input_bindings(pr, fact->input_roles, Origin::KbForward, &gained_inputs);
    const auto positional = pr.outputs;
    for (std::size_t i = 0; i < positional.size() && i < fact->output_roles.size(); ++i)
      assign_role(positional[i], fact->output_roles[i], Origin::KbForward);

    bool reads_source = false;
    for (const auto &[slot, role] : fact->input_roles)
      if (role == Role::DataSource) reads_source = true;
    if (reads_source)
      for (NodeId out : pr.outputs) aw_.source_outputs.insert(out);

    for (NodeId v : gained_inputs) backward_dfs(v);
  }

  void process_pr_backward(int pr_index) {
    const ProvRel &pr = aw_.wir.prs[pr_index];
    const OpNode &op = aw_.wir.op(pr.op);
    if (op.op_name == "Assign") {
      propagate_assign(pr, /*forward=*/false);
      return;
    }
    // Element containers spread their output's features/labels role onto
    // every element, which lets chains like concat([a, b]) propagate.
    if (op.op_name == "List" || op.op_name == "Tuple") {
      std::set<Role> roles;
      for (NodeId out : pr.outputs)
        for (Role r : roles_of(out))
          if (r == Role::Features || r == Role::Labels) roles.insert(r);
      for (NodeId in : pr.inputs)
        for (Role r : roles) assign_role(in, r, Origin::KbBackward);
      return;
    }
    std::vector<std::set<Role>> observed;
    for (NodeId out : pr.outputs) observed.push_back(roles_of(out));
    auto bindings = kb::query_backward(kb_, observed, op.op_name);
    if (!bindings) return;
    std::vector<std::pair<kb::Slot, Role>> pairs;
    for (const auto &b : *bindings) pairs.push_back({b.slot, b.role});
    apply_input_bindings(pr, pairs, Origin::KbBackward, nullptr);
  }

  void apply_input_bindings(const ProvRel &pr,
                            const std::vector<std::pair<kb::Slot, Role>> &bindings,
                            Origin origin, std::vector<NodeId> *gained) {
    const OpNode &op = aw_.wir.op(pr.op);
    std::vector<NodeId> positional = positional_inputs(aw_.wir, pr);
    std::set<int> explicit_positions;
    for (const auto &[slot, role] : bindings)
      if (slot.kind == kb::Slot::Kind::Position) explicit_positions.insert(slot.position);
    for (const auto &[slot, role] : bindings) {
      std::vector<NodeId> targets;
      switch (slot.kind) {
        case kb::Slot::Kind::Position:
          if (slot.position >= 1 && slot.position <= static_cast<int>(positional.size()))
            targets.push_back(positional[slot.position - 1]);
          break;
        case kb::Slot::Kind::Keyword:
          if (auto v = op.keyword(slot.keyword)) targets.push_back(*v);
          break;
        case kb::Slot::Kind::Caller:
          if (pr.caller) targets.push_back(*pr.caller);
          break;
        case kb::Slot::Kind::Variadic:
          for (std::size_t i = 0; i < positional.size(); ++i)
            if (!explicit_positions.count(static_cast<int>(i) + 1))
              targets.push_back(positional[i]);
          break;
      }
      for (NodeId t : targets) {
        if (assign_role(t, role, origin) && gained) gained->push_back(t);
      }
    }
  }

  // A data-reading output that ends up carrying features or labels is the
  // training dataset of the script.
  void derive_train_datasets() {
    for (NodeId v : aw_.source_outputs) {
      const VarNode &var = aw_.wir.var(v);
      if (var.has_role(Role::Features) || var.has_role(Role::Labels))
        aw_.wir.var(v).annotations.insert({Role::TrainDataset, Origin::KbBackward});
    }
  }

  const kb::KnowledgeBase &kb_;
  AnnotatedWir aw_;
  std::map<NodeId, int> pr_of_op_;
  std::vector<ImportSeed> seeds_;
  int gained_this_iteration_ = 0;
  std::vector<NodeId> *gained_vars_ = nullptr;
  const std::set<Edge> *current_backward_visited_ = nullptr;
  const std::set<NodeId> *current_backward_processed_ = nullptr;
};

} // namespace

std::vector<ImportSeed> collect_import_seeds(const Wir &w) {
  std::vector<ImportSeed> seeds;
  for (int i = 0; i < static_cast<int>(w.prs.size()); ++i) {
    const OpNode &op = w.op(w.prs[i].op);
    if (op.op_name != "Import" && op.op_name != "ImportFrom") continue;
    auto [lib, rest] = split_library(op.qualifier.value_or(""));
    seeds.push_back(ImportSeed{i, lib, rest});
  }
  return seeds;
}

AnnotatedWir annotate(Wir w, const kb::KnowledgeBase &kb) {
  return Annotator(std::move(w), kb).run();
}

std::optional<LibraryRef> resolve_call_library(const AnnotatedWir &aw, const OpNode &op) {
  if (!op.qualifier) return std::nullopt;
  std::vector<std::string> parts = split_dotted(*op.qualifier);
  if (parts.empty()) return std::nullopt;
  auto it = aw.import_bindings.find(parts[0]);
  if (it == aw.import_bindings.end()) return std::nullopt;
  LibraryRef ref = it->second;
  // Middle segments (everything between the bound root and the operation
  // name) extend the module path.
  for (std::size_t i = 1; i + 1 < parts.size(); ++i) {
    if (!ref.module.empty()) ref.module += ".";
    ref.module += parts[i];
  }
  return ref;
}

std::string serialize_annotations(const AnnotatedWir &aw) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto &v : aw.wir.vars) {
    if (v.annotations.empty()) continue;
    nlohmann::ordered_json entry;
    entry["name"] = v.display_name();
    entry["id"] = v.id;
    entry["version"] = v.version;
    nlohmann::ordered_json roles = nlohmann::ordered_json::array();
    for (const auto &[role, origin] : v.annotations)
      roles.push_back({{"role", role_name(role)}, {"origin", origin_name(origin)}});
    entry["roles"] = std::move(roles);
    out.push_back(std::move(entry));
  }
  return out.dump(2);
}

} // namespace mlprov::annotate
