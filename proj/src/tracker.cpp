#include "mlprov/tracker.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

namespace mlprov::track {

using annotate::AnnotatedWir;
using wir::NodeId;
using wir::OpNode;
using wir::ProvRel;
using wir::VarNode;
using wir::Wir;
using ordered_json = nlohmann::ordered_json;

std::string Bound::text(const char *when_unbounded) const {
  switch (kind) {
    case Kind::Unbounded: return when_unbounded;
    case Kind::Finite: return std::to_string(value);
    case Kind::EndOffset: return "end-" + std::to_string(value);
    case Kind::Unknown: return "?";
  }
  return "?";
}

ColumnRef ColumnRef::name_ref(std::string n) {
  ColumnRef r;
  r.kind = Kind::Name;
  r.name = std::move(n);
  return r;
}

ColumnRef ColumnRef::index_ref(std::int64_t i) {
  ColumnRef r;
  r.kind = Kind::Index;
  r.index = i;
  return r;
}

ColumnRef ColumnRef::range_ref(Bound lo, Bound up, Bound st) {
  ColumnRef r;
  r.kind = Kind::Range;
  r.lower = lo;
  r.upper = up;
  r.step = st;
  return r;
}

std::string ColumnRef::text() const {
  switch (kind) {
    case Kind::Name: return name;
    case Kind::Index: return std::to_string(index);
    case Kind::Range: {
      std::string out = "[" + lower.text("-inf") + "," + upper.text("+inf");
      if (step.kind == Bound::Kind::Finite) out += ":" + step.text("");
      out += ")";
      return out;
    }
  }
  return "";
}

void ColumnSets::add(const ColumnRef &ref, bool exclusion) {
  auto &dst = exclusion ? excluded : included;
  auto &other = exclusion ? included : excluded;
  if (ref.kind == ColumnRef::Kind::Name) {
    other.erase(std::remove(other.begin(), other.end(), ref), other.end());
  }
  auto pos = std::lower_bound(dst.begin(), dst.end(), ref);
  if (pos == dst.end() || !(*pos == ref)) dst.insert(pos, ref);
}

namespace {

std::vector<NodeId> positional_inputs_of(const Wir &w, const ProvRel &pr) {
  const OpNode &op = w.op(pr.op);
  std::set<NodeId> kw_values;
  for (const auto &[k, v] : op.keyword_args) kw_values.insert(v);
  std::vector<NodeId> out;
  for (NodeId v : pr.inputs)
    if (!kw_values.count(v)) out.push_back(v);
  return out;
}

std::string source_string_of_pr(const Wir &w, const ProvRel &pr) {
  std::vector<NodeId> positional = positional_inputs_of(w, pr);
  NodeId v = -1;
  if (!positional.empty()) {
    v = positional.front();
  } else if (!pr.inputs.empty()) {
    v = pr.inputs.front();
  } else {
    return "<dynamic>";
  }
  const VarNode &var = w.var(v);
  if (var.value && std::holds_alternative<std::string>(*var.value))
    return std::get<std::string>(*var.value);
  return "<dynamic>";
}

struct TrackerPass {
  const AnnotatedWir &aw;
  const kb::KnowledgeBase &kb;
  TrackResult &result;
  std::set<std::string> trained_model_ops;
  std::set<std::string> model_ops;

  const Wir &w() const { return aw.wir; }

  std::set<Role> roles_of(NodeId v) const {
    std::set<Role> out;
    for (const auto &[r, o] : w().var(v).annotations) out.insert(r);
    return out;
  }

  void diag(const std::string &code, const std::string &message, int line) {
    result.diagnostics.push_back({code, message, line});
  }

  std::vector<NodeId> positional_inputs(const ProvRel &pr) const {
    return positional_inputs_of(w(), pr);
  }

  kb::KeywordView keyword_view(const ProvRel &pr) const {
    kb::KeywordView view;
    for (const auto &[key, var_id] : w().op(pr.op).keyword_args) {
      const VarNode &v = w().var(var_id);
      view[key] = v.value;
    }
    return view;
  }

  int producer_index(NodeId var_id) const {
    auto it = w().producer.find(var_id);
    return it == w().producer.end() ? -1 : it->second;
  }

  // The annotation a selection applies to: output roles first, then the
  // caller, then the inputs. The priority keeps a label extraction from a
  // features-annotated frame from polluting the feature sets.
  std::set<Role> targets_of(const ProvRel &pr) const {
    auto pick = [](const std::set<Role> &roles) {
      std::set<Role> out;
      if (roles.count(Role::Features)) out.insert(Role::Features);
      if (roles.count(Role::Labels)) out.insert(Role::Labels);
      return out;
    };
    std::set<Role> from_outputs;
    for (NodeId v : pr.outputs)
      for (Role r : pick(roles_of(v))) from_outputs.insert(r);
    if (!from_outputs.empty()) return from_outputs;
    if (pr.caller) {
      std::set<Role> from_caller = pick(roles_of(*pr.caller));
      if (!from_caller.empty()) return from_caller;
    }
    std::set<Role> from_inputs;
    for (NodeId v : pr.inputs)
      for (Role r : pick(roles_of(v))) from_inputs.insert(r);
    return from_inputs;
  }

  // ---- constant harvesting ----
  std::optional<ColumnRef> ref_from_literal(const Literal &lit) const {
    if (std::holds_alternative<std::string>(lit))
      return ColumnRef::name_ref(std::get<std::string>(lit));
    if (std::holds_alternative<std::int64_t>(lit))
      return ColumnRef::index_ref(std::get<std::int64_t>(lit));
    return std::nullopt;
  }

  std::vector<ColumnRef> direct_constants(const ProvRel &pr) const {
    std::vector<ColumnRef> out;
    for (NodeId v : positional_inputs(pr)) {
      const VarNode &var = w().var(v);
      if (!var.value) continue;
      if (auto ref = ref_from_literal(*var.value)) out.push_back(*ref);
    }
    return out;
  }

  // Constant leaves reachable through container and index plumbing.
  void collect_constants(int pr_index, std::vector<ColumnRef> &out, int depth) const {
    if (depth > static_cast<int>(w().prs.size())) return;
    const ProvRel &pr = w().prs[pr_index];
    for (NodeId v : positional_inputs(pr)) {
      const VarNode &var = w().var(v);
      if (var.value) {
        if (auto ref = ref_from_literal(*var.value)) out.push_back(*ref);
        continue;
      }
      int prod = producer_index(v);
      if (prod < 0) continue;
      const std::string &op = w().op(w().prs[prod].op).op_name;
      // For covers loop variables iterating over a constant list.
      if (op == "List" || op == "Tuple" || op == "Index" || op == "Set" || op == "Assign" ||
          op == "For")
        collect_constants(prod, out, depth + 1);
    }
  }

  // ---- slice interpretation ----
  std::vector<ColumnRef> interpret_slice(int pr_index, int depth) {
    std::vector<ColumnRef> out;
    if (depth > static_cast<int>(w().prs.size())) return out;
    const ProvRel &pr = w().prs[pr_index];
    const OpNode &op = w().op(pr.op);
    const std::string &name = op.op_name;

    if (name == "Slice") {
      auto bound_of = [&](const char *key) {
        auto var_id = op.keyword(key);
        if (!var_id) return Bound::unbounded();
        const VarNode &v = w().var(*var_id);
        if (v.value && std::holds_alternative<std::int64_t>(*v.value))
          return Bound::from_index(std::get<std::int64_t>(*v.value));
        diag("non_constant_bound", "slice bound is not a constant integer", op.line);
        return Bound::unknown();
      };
      out.push_back(ColumnRef::range_ref(bound_of("lower"), bound_of("upper"), bound_of("step")));
      return out;
    }
    if (name == "ExtSlice") {
      // In a two-dimensional subscript the second component addresses the
      // columns.
      if (pr.inputs.empty()) return out;
      NodeId comp = pr.inputs.size() >= 2 ? pr.inputs[1] : pr.inputs[0];
      int prod = producer_index(comp);
      if (prod >= 0) return interpret_slice(prod, depth + 1);
      return out;
    }
    if (name == "Index") {
      if (pr.inputs.empty()) return out;
      NodeId v = pr.inputs[0];
      const VarNode &var = w().var(v);
      if (var.value) {
        if (auto ref = ref_from_literal(*var.value)) {
          out.push_back(*ref);
        } else {
          diag("non_constant_bound", "subscript index is not a column constant", op.line);
        }
        return out;
      }
      int prod = producer_index(v);
      if (prod < 0) {
        diag("traversal_dead_end", "subscript index has no producer", op.line);
        return out;
      }
      const std::string &pname = w().op(w().prs[prod].op).op_name;
      if (pname == "List" || pname == "Tuple" || pname == "Set") {
        collect_constants(prod, out, depth + 1);
        if (out.empty())
          diag("traversal_dead_end", "no constants under subscript index", op.line);
        return out;
      }
      return interpret_slice(prod, depth + 1);
    }
    if (name == "Subscript" || name == "Assign" || name == "For") {
      // Selections routed through a named constant, a named list, a loop
      // variable over constants, or a nested subscript are resolved by
      // walking to the producing expression.
      if (pr.inputs.empty()) return out;
      const VarNode &v = w().var(pr.inputs[0]);
      if (v.value) {
        if (auto ref = ref_from_literal(*v.value)) out.push_back(*ref);
        return out;
      }
      int prod = producer_index(pr.inputs[0]);
      if (prod >= 0) return interpret_slice(prod, depth + 1);
      return out;
    }
    if (name == "List" || name == "Tuple" || name == "Set") {
      collect_constants(pr_index, out, depth + 1);
      return out;
    }
    diag("traversal_dead_end", "cannot interpret slice at operation " + name, op.line);
    return out;
  }

  // ---- guided traversal ----
  void apply_refs(const std::vector<ColumnRef> &refs, bool exclusion, Role target,
                  ColumnSets &sets, const std::string &op_name) {
    for (const auto &ref : refs) {
      sets.add(ref, exclusion);
      result.member_log.push_back({ref, target, exclusion, op_name});
    }
  }

  void guide_eval(int pr_index, const kb::TrackerFact &fact, bool exclusion, Role target,
                  ColumnSets &sets, int depth) {
    result.max_guide_depth = std::max(result.max_guide_depth, depth);
    if (depth > static_cast<int>(w().prs.size())) {
      diag("recursion_limit", "guided traversal exceeded PR count", 0);
      return;
    }
    const ProvRel &entry = w().prs[pr_index];
    const OpNode &entry_op = w().op(entry.op);

    // Constants directly on the PR settle it immediately.
    std::vector<ColumnRef> direct = direct_constants(entry);
    if (!direct.empty()) {
      apply_refs(direct, exclusion, target, sets, entry_op.op_name);
      return;
    }

    int cursor = pr_index;
    for (const auto &step : fact.traversal_rule) {
      const ProvRel &pr = w().prs[cursor];
      const OpNode &op = w().op(pr.op);
      switch (step.kind) {
        case kb::TraversalStep::Kind::FollowInput: {
          if (step.position < 1 || step.position > static_cast<int>(pr.inputs.size())) {
            diag("traversal_dead_end", "follow_input position out of range at " + op.op_name,
                 op.line);
            return;
          }
          int prod = producer_index(pr.inputs[step.position - 1]);
          if (prod < 0) {
            diag("traversal_dead_end", "input has no producing PR at " + op.op_name, op.line);
            return;
          }
          cursor = prod;
          break;
        }
        case kb::TraversalStep::Kind::FollowCaller: {
          if (!pr.caller) {
            diag("traversal_dead_end", "operation has no caller at " + op.op_name, op.line);
            return;
          }
          int prod = producer_index(*pr.caller);
          if (prod < 0) {
            diag("traversal_dead_end", "caller has no producing PR at " + op.op_name, op.line);
            return;
          }
          cursor = prod;
          break;
        }
        case kb::TraversalStep::Kind::CollectConstants: {
          std::vector<ColumnRef> refs;
          collect_constants(cursor, refs, depth + 1);
          if (refs.empty()) {
            diag("traversal_dead_end", "no constants found from " + entry_op.op_name,
                 entry_op.line);
            return;
          }
          apply_refs(refs, exclusion, target, sets, entry_op.op_name);
          return;
        }
        case kb::TraversalStep::Kind::InterpretSlice: {
          std::vector<ColumnRef> refs = interpret_slice(cursor, depth + 1);
          if (refs.empty()) {
            diag("traversal_dead_end", "no interpretable slice from " + entry_op.op_name,
                 entry_op.line);
            return;
          }
          apply_refs(refs, exclusion, target, sets, entry_op.op_name);
          return;
        }
        case kb::TraversalStep::Kind::RecurseAllInputs: {
          for (NodeId v : pr.inputs) {
            int prod = producer_index(v);
            if (prod < 0) continue;
            const ProvRel &ppr = w().prs[prod];
            const kb::TrackerFact *tf =
                kb::query_tracker(kb, w().op(ppr.op).op_name, keyword_view(ppr));
            if (tf) guide_eval(prod, *tf, exclusion, target, sets, depth + 1);
          }
          return;
        }
      }
    }
    // The rule ended on a move; pick up the traversal rule of the PR we
    // arrived at, keeping the exclusion intent of the entry operation.
    const ProvRel &dest = w().prs[cursor];
    const kb::TrackerFact *next =
        kb::query_tracker(kb, w().op(dest.op).op_name, keyword_view(dest));
    if (next) {
      guide_eval(cursor, *next, exclusion, target, sets, depth + 1);
      return;
    }
    std::vector<ColumnRef> direct_dest = direct_constants(dest);
    if (!direct_dest.empty()) {
      apply_refs(direct_dest, exclusion, target, sets, w().op(dest.op).op_name);
      return;
    }
    diag("traversal_dead_end", "traversal rule ended without constants", entry_op.line);
  }

  // ---- model discovery ----
  bool is_training_pr(const ProvRel &pr) const {
    const std::string &name = w().op(pr.op).op_name;
    if (name == "Assign" || !trained_model_ops.count(name)) return false;
    for (NodeId out : pr.outputs)
      if (w().var(out).has_role(Role::TrainedModel)) return true;
    return false;
  }

  // Model variable a training PR belongs to: the model-annotated caller,
  // otherwise the named variable its trained output is assigned to.
  NodeId model_var_of(const ProvRel &pr) const {
    if (pr.caller && w().var(*pr.caller).has_role(Role::Model)) return *pr.caller;
    NodeId out = pr.outputs.front();
    for (NodeId candidate : pr.outputs) {
      if (w().var(candidate).has_role(Role::TrainedModel)) {
        out = candidate;
        break;
      }
    }
    // Follow single-step assignments to a named variable.
    for (const auto &next : w().prs) {
      if (w().op(next.op).op_name != "Assign") continue;
      if (next.inputs.size() == 1 && next.inputs[0] == out && !next.outputs.empty()) {
        const VarNode &target = w().var(next.outputs[0]);
        if (target.name && !target.is_temp) return next.outputs[0];
      }
    }
    return out;
  }

  std::string model_api_of(NodeId model_var) const {
    NodeId current = model_var;
    for (std::size_t hops = 0; hops <= w().prs.size(); ++hops) {
      int prod = producer_index(current);
      if (prod < 0) break;
      const ProvRel &pr = w().prs[prod];
      const std::string &name = w().op(pr.op).op_name;
      if (name == "Assign") {
        if (pr.inputs.size() != 1) break;
        current = pr.inputs[0];
        continue;
      }
      if (model_ops.count(name) || trained_model_ops.count(name)) return name;
      break;
    }
    return "";
  }

  // Backward closure over producing PRs, starting from a training call's
  // inputs and caller. Shared preprocessing lands in every model's cone.
  std::set<int> backward_cone(const std::vector<int> &training_prs, NodeId model_var) const {
    std::set<int> cone;
    std::vector<NodeId> work;
    for (int idx : training_prs) {
      const ProvRel &pr = w().prs[idx];
      cone.insert(idx);
      for (NodeId v : pr.inputs) work.push_back(v);
      if (pr.caller) work.push_back(*pr.caller);
    }
    work.push_back(model_var);
    std::set<NodeId> seen;
    while (!work.empty()) {
      NodeId v = work.back();
      work.pop_back();
      if (!seen.insert(v).second) continue;
      int prod = producer_index(v);
      if (prod < 0) continue;
      if (!cone.insert(prod).second) continue;
      const ProvRel &pr = w().prs[prod];
      for (NodeId in : pr.inputs) work.push_back(in);
      if (pr.caller) work.push_back(*pr.caller);
    }
    // Exclusion calls like pop or del mutate a frame without producing
    // anything downstream; pull them in when they act on a cone variable.
    for (int i = 0; i < static_cast<int>(w().prs.size()); ++i) {
      if (cone.count(i)) continue;
      const ProvRel &pr = w().prs[i];
      if (!pr.caller || !seen.count(*pr.caller)) continue;
      const kb::TrackerFact *fact =
          kb::query_tracker(kb, w().op(pr.op).op_name, keyword_view(pr));
      if (fact && fact->column_exclusion) cone.insert(i);
    }
    return cone;
  }

  std::string source_string_of(const ProvRel &pr) const { return source_string_of_pr(w(), pr); }

  void run(const std::string &script_path) {
    trained_model_ops = kb.ops_emitting(Role::TrainedModel);
    model_ops = kb.ops_emitting(Role::Model);

    // Group training PRs by the model variable they train.
    std::map<NodeId, std::vector<int>> by_model;
    for (int i = 0; i < static_cast<int>(w().prs.size()); ++i) {
      if (is_training_pr(w().prs[i])) by_model[model_var_of(w().prs[i])].push_back(i);
    }

    for (const auto &[model_id, training] : by_model) {
      ProvenanceRecord rec;
      rec.script_path = script_path;
      rec.model_var = w().var(model_id).display_name();
      rec.model_api = model_api_of(model_id);
      if (rec.model_api.empty())
        rec.model_api = w().op(w().prs[training.front()].op).op_name;

      std::set<int> cone = backward_cone(training, model_id);

      for (int pr_index : cone) {
        const ProvRel &pr = w().prs[pr_index];
        const OpNode &op = w().op(pr.op);
        const kb::TrackerFact *fact = kb::query_tracker(kb, op.op_name, keyword_view(pr));
        if (!fact) continue;
        std::set<Role> targets = targets_of(pr);
        for (Role target : targets) {
          ColumnSets &sets =
              (target == Role::Labels) ? rec.label_columns : rec.feature_columns;
          guide_eval(pr_index, *fact, fact->column_exclusion, target, sets, 0);
        }
      }

      std::set<std::string> sources;
      for (int pr_index : cone) {
        const ProvRel &pr = w().prs[pr_index];
        bool is_source = false;
        for (NodeId out : pr.outputs)
          if (aw.source_outputs.count(out)) is_source = true;
        if (is_source) sources.insert(source_string_of(pr));
      }
      rec.data_sources.assign(sources.begin(), sources.end());
      result.records.push_back(std::move(rec));
    }
  }
};

} // namespace

TrackResult track(const AnnotatedWir &aw, const kb::KnowledgeBase &kb,
                  const std::string &script_path) {
  TrackResult result;
  TrackerPass pass{aw, kb, result, {}, {}};
  pass.run(script_path);
  return result;
}

std::set<std::string> resolve_data_sources(const AnnotatedWir &aw) {
  std::set<std::string> out;
  for (const auto &pr : aw.wir.prs) {
    bool is_source = false;
    for (wir::NodeId v : pr.outputs)
      if (aw.source_outputs.count(v)) is_source = true;
    if (is_source) out.insert(source_string_of_pr(aw.wir, pr));
  }
  return out;
}

namespace {

ordered_json bound_to_json(const Bound &b) {
  switch (b.kind) {
    case Bound::Kind::Unbounded: return nullptr;
    case Bound::Kind::Finite: return b.value;
    case Bound::Kind::EndOffset: return ordered_json{{"end_minus", b.value}};
    case Bound::Kind::Unknown: return "unknown";
  }
  return nullptr;
}

ordered_json ref_to_json(const ColumnRef &r) {
  switch (r.kind) {
    case ColumnRef::Kind::Name: return ordered_json{{"kind", "name"}, {"name", r.name}};
    case ColumnRef::Kind::Index: return ordered_json{{"kind", "index"}, {"index", r.index}};
    case ColumnRef::Kind::Range:
      return ordered_json{{"kind", "range"},
                          {"lower", bound_to_json(r.lower)},
                          {"upper", bound_to_json(r.upper)},
                          {"step", bound_to_json(r.step)}};
  }
  return nullptr;
}

ordered_json sets_to_json(const ColumnSets &s) {
  ordered_json j;
  j["included"] = ordered_json::array();
  for (const auto &r : s.included) j["included"].push_back(ref_to_json(r));
  j["excluded"] = ordered_json::array();
  for (const auto &r : s.excluded) j["excluded"].push_back(ref_to_json(r));
  return j;
}

ordered_json record_to_json(const ProvenanceRecord &rec) {
  ordered_json j;
  j["model_var"] = rec.model_var;
  j["model_api"] = rec.model_api;
  j["data_sources"] = rec.data_sources;
  j["feature_columns"] = sets_to_json(rec.feature_columns);
  j["label_columns"] = sets_to_json(rec.label_columns);
  j["script_path"] = rec.script_path;
  return j;
}

std::string sets_to_text(const ColumnSets &s) {
  std::string out = "C+ {";
  if (s.included.empty()) {
    out += "*";
  } else {
    for (std::size_t i = 0; i < s.included.size(); ++i)
      out += (i ? ", " : "") + s.included[i].text();
  }
  out += "}  C- {";
  for (std::size_t i = 0; i < s.excluded.size(); ++i)
    out += (i ? ", " : "") + s.excluded[i].text();
  out += "}";
  return out;
}

} // namespace

std::string serialize_records(const std::vector<ProvenanceRecord> &records) {
  ordered_json out = ordered_json::array();
  for (const auto &rec : records) out.push_back(record_to_json(rec));
  return out.dump(2);
}

namespace {

Bound bound_from_json(const nlohmann::json &j) {
  if (j.is_null()) return Bound::unbounded();
  if (j.is_number_integer()) return Bound::finite(j.get<std::int64_t>());
  if (j.is_object() && j.contains("end_minus") && j["end_minus"].is_number_integer())
    return Bound::end_offset(j["end_minus"].get<std::int64_t>());
  if (j.is_string() && j.get<std::string>() == "unknown") return Bound::unknown();
  throw TruthFormatError("bad bound: " + j.dump());
}

ColumnRef ref_from_json(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw TruthFormatError("column ref must be an object with a kind");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "name") {
    if (!j.contains("name") || !j["name"].is_string())
      throw TruthFormatError("name ref without a name");
    return ColumnRef::name_ref(j["name"].get<std::string>());
  }
  if (kind == "index") {
    if (!j.contains("index") || !j["index"].is_number_integer())
      throw TruthFormatError("index ref without an integer index");
    return ColumnRef::index_ref(j["index"].get<std::int64_t>());
  }
  if (kind == "range") {
    return ColumnRef::range_ref(bound_from_json(j.value("lower", nlohmann::json())),
                                bound_from_json(j.value("upper", nlohmann::json())),
                                bound_from_json(j.value("step", nlohmann::json())));
  }
  throw TruthFormatError("unknown column ref kind '" + kind + "'");
}

ColumnSets sets_from_json(const nlohmann::json &j) {
  ColumnSets s;
  if (!j.is_object()) return s;
  if (j.contains("included"))
    for (const auto &r : j["included"]) s.add(ref_from_json(r), false);
  if (j.contains("excluded"))
    for (const auto &r : j["excluded"]) s.add(ref_from_json(r), true);
  return s;
}

} // namespace

std::vector<ProvenanceRecord> parse_records(const std::string &json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array())
    throw TruthFormatError("prediction file is not a JSON array");
  std::vector<ProvenanceRecord> out;
  for (const auto &j : doc) {
    ProvenanceRecord rec;
    rec.model_var = j.value("model_var", "");
    rec.model_api = j.value("model_api", "");
    if (j.contains("data_sources"))
      for (const auto &s : j["data_sources"]) rec.data_sources.push_back(s.get<std::string>());
    if (j.contains("feature_columns")) rec.feature_columns = sets_from_json(j["feature_columns"]);
    if (j.contains("label_columns")) rec.label_columns = sets_from_json(j["label_columns"]);
    rec.script_path = j.value("script_path", "");
    out.push_back(std::move(rec));
  }
  return out;
}

ColumnRef parse_column_ref_json(const std::string &json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw TruthFormatError("column ref is not valid JSON");
  return ref_from_json(doc);
}

std::string records_to_text(const std::vector<ProvenanceRecord> &records) {
  std::string out;
  if (records.empty()) return "no trained models found\n";
  for (const auto &rec : records) {
    out += "model " + rec.model_var + " (" + rec.model_api + ")\n";
    out += "  sources: ";
    for (std::size_t i = 0; i < rec.data_sources.size(); ++i)
      out += (i ? ", " : "") + rec.data_sources[i];
    out += "\n  features: " + sets_to_text(rec.feature_columns);
    out += "\n  labels:   " + sets_to_text(rec.label_columns);
    out += "\n";
  }
  return out;
}

} // namespace mlprov::track
