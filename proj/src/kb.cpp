#include "mlprov/kb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mlprov::kb {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::optional<Slot> Slot::parse(const std::string &text) {
  if (text.empty()) return std::nullopt;
  Slot s;
  if (text == "caller") {
    s.kind = Kind::Caller;
    return s;
  }
  if (text == "*") {
    s.kind = Kind::Variadic;
    return s;
  }
  bool all_digits = std::all_of(text.begin(), text.end(),
                                [](unsigned char c) { return std::isdigit(c); });
  if (all_digits) {
    int pos = std::stoi(text);
    if (pos < 1) return std::nullopt;   // positions are 1-based
    s.kind = Kind::Position;
    s.position = pos;
    return s;
  }
  s.kind = Kind::Keyword;
  s.keyword = text;
  return s;
}

std::string Slot::text() const {
  switch (kind) {
    case Kind::Position: return std::to_string(position);
    case Kind::Keyword: return keyword;
    case Kind::Caller: return "caller";
    case Kind::Variadic: return "*";
  }
  return "";
}

std::set<std::string> KnowledgeBase::ops_emitting(Role role) const {
  std::set<std::string> out;
  for (const auto &f : api_facts) {
    for (Role r : f.output_roles) {
      if (r == role) {
        out.insert(f.api_name);
        break;
      }
    }
  }
  return out;
}

bool KnowledgeBase::is_data_source_op(const std::string &op_name) const {
  for (const auto &f : api_facts) {
    if (f.api_name != op_name) continue;
    for (const auto &[slot, role] : f.input_roles)
      if (role == Role::DataSource) return true;
  }
  return false;
}

namespace {

Role require_role(const json &j, const std::string &pointer) {
  if (!j.is_string()) throw KbFormatError(pointer, "expected a role string");
  auto role = parse_role(j.get<std::string>());
  if (!role) throw KbFormatError(pointer, "unknown role '" + j.get<std::string>() + "'");
  return *role;
}

Literal literal_from_json(const json &j, const std::string &pointer) {
  if (j.is_null()) return NoneLit{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return static_cast<std::int64_t>(j.get<std::int64_t>());
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw KbFormatError(pointer, "expected a literal");
}

json literal_to_json(const Literal &v) {
  if (std::holds_alternative<NoneLit>(v)) return nullptr;
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
  if (std::holds_alternative<double>(v)) return std::get<double>(v);
  return std::get<std::string>(v);
}

KbFact parse_api_fact(const json &j, const std::string &pointer) {
  if (!j.is_object()) throw KbFormatError(pointer, "expected an object");
  KbFact f;
  if (!j.contains("library") || !j["library"].is_string())
    throw KbFormatError(pointer + "/library", "library is required");
  f.library = j["library"].get<std::string>();
  if (j.contains("module") && !j["module"].is_null()) {
    if (!j["module"].is_string()) throw KbFormatError(pointer + "/module", "expected string");
    f.module = j["module"].get<std::string>();
  }
  if (j.contains("caller") && !j["caller"].is_null())
    f.caller = require_role(j["caller"], pointer + "/caller");
  if (!j.contains("api_name") || !j["api_name"].is_string() ||
      j["api_name"].get<std::string>().empty())
    throw KbFormatError(pointer + "/api_name", "api_name must be a non-empty string");
  f.api_name = j["api_name"].get<std::string>();

  std::set<Slot> seen_slots;
  int variadics = 0;
  if (j.contains("input_roles")) {
    const json &roles = j["input_roles"];
    if (!roles.is_array()) throw KbFormatError(pointer + "/input_roles", "expected an array");
    for (std::size_t i = 0; i < roles.size(); ++i) {
      std::string p = pointer + "/input_roles/" + std::to_string(i);
      const json &entry = roles[i];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string())
        throw KbFormatError(p, "expected [slot, role]");
      auto slot = Slot::parse(entry[0].get<std::string>());
      if (!slot) throw KbFormatError(p, "bad slot '" + entry[0].get<std::string>() + "'");
      if (slot->kind == Slot::Kind::Variadic) ++variadics;
      if (!seen_slots.insert(*slot).second) throw KbFormatError(p, "duplicate slot");
      f.input_roles.push_back({*slot, require_role(entry[1], p)});
    }
  }
  if (variadics > 1) throw KbFormatError(pointer + "/input_roles", "more than one variadic tail");
  if (j.contains("output_roles")) {
    const json &roles = j["output_roles"];
    if (!roles.is_array()) throw KbFormatError(pointer + "/output_roles", "expected an array");
    for (std::size_t i = 0; i < roles.size(); ++i)
      f.output_roles.push_back(require_role(roles[i], pointer + "/output_roles/" + std::to_string(i)));
  }
  return f;
}

TrackerFact parse_tracker_fact(const json &j, const std::string &pointer) {
  if (!j.is_object()) throw KbFormatError(pointer, "expected an object");
  TrackerFact f;
  if (!j.contains("op_matcher") || !j["op_matcher"].is_string() ||
      j["op_matcher"].get<std::string>().empty())
    throw KbFormatError(pointer + "/op_matcher", "op_matcher must be a non-empty string");
  f.op_matcher = j["op_matcher"].get<std::string>();
  if (j.contains("condition") && !j["condition"].is_null()) {
    const json &cond = j["condition"];
    if (!cond.is_array()) throw KbFormatError(pointer + "/condition", "expected an array");
    for (std::size_t i = 0; i < cond.size(); ++i) {
      std::string p = pointer + "/condition/" + std::to_string(i);
      const json &clause = cond[i];
      if (!clause.is_object() || !clause.contains("key") || !clause["key"].is_string())
        throw KbFormatError(p, "expected {key, equals?}");
      ConditionClause c;
      c.key = clause["key"].get<std::string>();
      if (clause.contains("equals")) c.equals = literal_from_json(clause["equals"], p + "/equals");
      f.condition.push_back(std::move(c));
    }
  }
  if (j.contains("column_exclusion")) {
    if (!j["column_exclusion"].is_boolean())
      throw KbFormatError(pointer + "/column_exclusion", "expected a boolean");
    f.column_exclusion = j["column_exclusion"].get<bool>();
  }
  if (!j.contains("traversal_rule") || !j["traversal_rule"].is_array() ||
      j["traversal_rule"].empty())
    throw KbFormatError(pointer + "/traversal_rule", "traversal_rule must be a non-empty array");
  const json &rule = j["traversal_rule"];
  for (std::size_t i = 0; i < rule.size(); ++i) {
    std::string p = pointer + "/traversal_rule/" + std::to_string(i);
    const json &step = rule[i];
    if (!step.is_object() || !step.contains("step") || !step["step"].is_string())
      throw KbFormatError(p, "expected {step, ...}");
    std::string name = step["step"].get<std::string>();
    TraversalStep s;
    if (name == "follow_input") {
      s.kind = TraversalStep::Kind::FollowInput;
      if (!step.contains("k") || !step["k"].is_number_integer() || step["k"].get<int>() < 1)
        throw KbFormatError(p, "follow_input requires a 1-based position k");
      s.position = step["k"].get<int>();
    } else if (name == "follow_caller") {
      s.kind = TraversalStep::Kind::FollowCaller;
    } else if (name == "collect_constants") {
      s.kind = TraversalStep::Kind::CollectConstants;
    } else if (name == "interpret_slice") {
      s.kind = TraversalStep::Kind::InterpretSlice;
    } else if (name == "recurse_all_inputs") {
      s.kind = TraversalStep::Kind::RecurseAllInputs;
    } else {
      throw KbFormatError(p, "unknown step '" + name + "'");
    }
    f.traversal_rule.push_back(s);
  }
  return f;
}

std::string api_fact_key(const KbFact &f) {
  std::string key = f.library + "\x1f" + (f.module ? *f.module : "\x1e") + "\x1f" +
                    (f.caller ? role_name(*f.caller) : "\x1e") + "\x1f" + f.api_name;
  return key;
}

std::string tracker_fact_key(const TrackerFact &f) {
  std::string key = f.op_matcher;
  for (const auto &c : f.condition) {
    key += "\x1f" + c.key;
    if (c.equals) key += "=" + literal_repr(*c.equals);
  }
  return key;
}

} // namespace

KnowledgeBase parse_kb(const std::string &json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw KbFormatError("/", "not valid JSON");
  if (!doc.is_object()) throw KbFormatError("/", "expected a JSON object");
  KnowledgeBase kb;
  if (doc.contains("version")) {
    if (!doc["version"].is_string()) throw KbFormatError("/version", "expected string");
    kb.version = doc["version"].get<std::string>();
  }
  std::set<std::string> api_keys;
  if (doc.contains("api_facts")) {
    if (!doc["api_facts"].is_array()) throw KbFormatError("/api_facts", "expected an array");
    const json &facts = doc["api_facts"];
    for (std::size_t i = 0; i < facts.size(); ++i) {
      std::string pointer = "/api_facts/" + std::to_string(i);
      KbFact f = parse_api_fact(facts[i], pointer);
      if (!api_keys.insert(api_fact_key(f)).second)
        throw KbFormatError(pointer, "duplicate fact for (library, module, caller, api_name)");
      kb.api_facts.push_back(std::move(f));
    }
  }
  std::set<std::string> tracker_keys;
  if (doc.contains("tracker_facts")) {
    if (!doc["tracker_facts"].is_array())
      throw KbFormatError("/tracker_facts", "expected an array");
    const json &facts = doc["tracker_facts"];
    for (std::size_t i = 0; i < facts.size(); ++i) {
      std::string pointer = "/tracker_facts/" + std::to_string(i);
      TrackerFact f = parse_tracker_fact(facts[i], pointer);
      if (!tracker_keys.insert(tracker_fact_key(f)).second)
        throw KbFormatError(pointer, "duplicate tracker fact for (op_matcher, condition)");
      kb.tracker_facts.push_back(std::move(f));
    }
  }
  return kb;
}

KnowledgeBase load_kb(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KbFormatError("/", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kb(buf.str());
}

std::string serialize_kb(const KnowledgeBase &kb) {
  ordered_json doc;
  doc["version"] = kb.version;
  doc["api_facts"] = ordered_json::array();
  for (const auto &f : kb.api_facts) {
    ordered_json jf;
    jf["library"] = f.library;
    jf["module"] = f.module ? ordered_json(*f.module) : ordered_json(nullptr);
    jf["caller"] = f.caller ? ordered_json(role_name(*f.caller)) : ordered_json(nullptr);
    jf["api_name"] = f.api_name;
    ordered_json in = ordered_json::array();
    for (const auto &[slot, role] : f.input_roles)
      in.push_back(ordered_json::array({slot.text(), role_name(role)}));
    jf["input_roles"] = std::move(in);
    ordered_json out = ordered_json::array();
    for (Role r : f.output_roles) out.push_back(role_name(r));
    jf["output_roles"] = std::move(out);
    doc["api_facts"].push_back(std::move(jf));
  }
  doc["tracker_facts"] = ordered_json::array();
  for (const auto &f : kb.tracker_facts) {
    ordered_json jf;
    jf["op_matcher"] = f.op_matcher;
    if (f.condition.empty()) {
      jf["condition"] = nullptr;
    } else {
      ordered_json cond = ordered_json::array();
      for (const auto &c : f.condition) {
        ordered_json clause;
        clause["key"] = c.key;
        if (c.equals) clause["equals"] = literal_to_json(*c.equals);
        cond.push_back(std::move(clause));
      }
      jf["condition"] = std::move(cond);
    }
    jf["column_exclusion"] = f.column_exclusion;
    ordered_json rule = ordered_json::array();
    for (const auto &s : f.traversal_rule) {
      ordered_json step;
      switch (s.kind) {
        case TraversalStep::Kind::FollowInput:
          step["step"] = "follow_input";
          step["k"] = s.position;
          break;
        case TraversalStep::Kind::FollowCaller: step["step"] = "follow_caller"; break;
        case TraversalStep::Kind::CollectConstants: step["step"] = "collect_constants"; break;
        case TraversalStep::Kind::InterpretSlice: step["step"] = "interpret_slice"; break;
        case TraversalStep::Kind::RecurseAllInputs: step["step"] = "recurse_all_inputs"; break;
      }
      rule.push_back(std::move(step));
    }
    jf["traversal_rule"] = std::move(rule);
    doc["tracker_facts"].push_back(std::move(jf));
  }
  return doc.dump(2);
}

const KbFact *query_api(const KnowledgeBase &kb, const std::string &library,
                        const std::optional<std::string> &module,
                        const std::set<Role> &caller_roles, const std::string &op_name) {
  const KbFact *best = nullptr;
  int best_score = -1;
  for (const auto &f : kb.api_facts) {
    if (f.library != library || f.api_name != op_name) continue;
    if (f.module && (!module || *f.module != *module)) continue;
    if (f.caller && caller_roles.count(*f.caller) == 0) continue;
    int score = (f.module ? 1 : 0) + (f.caller ? 2 : 0);
    if (score > best_score) {
      best = &f;
      best_score = score;
    }
  }
  return best;
}

std::optional<std::vector<BackwardBinding>> query_backward(
    const KnowledgeBase &kb, const std::vector<std::set<Role>> &observed_output_roles,
    const std::string &op_name) {
  std::vector<BackwardBinding> bindings;
  bool matched = false;
  for (const auto &f : kb.api_facts) {
    if (f.api_name != op_name || f.output_roles.empty()) continue;
    bool consistent = false;
    std::size_t n = std::min(f.output_roles.size(), observed_output_roles.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (observed_output_roles[i].count(f.output_roles[i])) {
        consistent = true;
        break;
      }
    }
    if (!consistent) continue;
    matched = true;
    for (const auto &[slot, role] : f.input_roles) {
      bool dup = false;
      for (const auto &b : bindings)
        if (b.slot == slot && b.role == role) dup = true;
      if (!dup) bindings.push_back({slot, role});
    }
  }
  if (!matched) return std::nullopt;
  return bindings;
}

namespace {

bool clause_holds(const ConditionClause &clause, const KeywordView &kwargs) {
  auto it = kwargs.find(clause.key);
  if (it == kwargs.end()) return false;
  if (!clause.equals) return true;   // presence is enough
  if (!it->second) return false;     // non-constant value cannot satisfy equals
  return *it->second == *clause.equals;
}

} // namespace

const TrackerFact *query_tracker(const KnowledgeBase &kb, const std::string &op_name,
                                 const KeywordView &keyword_args) {
  for (const auto &f : kb.tracker_facts) {
    if (f.op_matcher != op_name) continue;
    if (f.condition.empty()) return &f;
    for (const auto &clause : f.condition)
      if (clause_holds(clause, keyword_args)) return &f;
  }
  return nullptr;
}

std::vector<KbDiagnostic> validate_kb(const KnowledgeBase &kb) {
  std::vector<KbDiagnostic> out;
  std::set<std::string> api_keys;
  for (std::size_t i = 0; i < kb.api_facts.size(); ++i) {
    const KbFact &f = kb.api_facts[i];
    std::string where = "/api_facts/" + std::to_string(i);
    if (!api_keys.insert(api_fact_key(f)).second)
      out.push_back({"duplicate_fact", where, "duplicate (library, module, caller, api_name)"});
    if (f.library.empty() && f.module)
      out.push_back({"unreachable_fact", where, "module set without a library"});
    if (f.api_name.empty()) out.push_back({"missing_api_name", where, "empty api_name"});
  }
  std::set<std::string> tracker_keys;
  for (std::size_t i = 0; i < kb.tracker_facts.size(); ++i) {
    const TrackerFact &f = kb.tracker_facts[i];
    std::string where = "/tracker_facts/" + std::to_string(i);
    if (!tracker_keys.insert(tracker_fact_key(f)).second)
      out.push_back({"duplicate_fact", where, "duplicate (op_matcher, condition)"});
    if (f.traversal_rule.empty())
      out.push_back({"empty_rule", where, "traversal_rule is empty"});
    for (std::size_t s = 0; s + 1 < f.traversal_rule.size(); ++s) {
      if (f.traversal_rule[s].terminal()) {
        out.push_back({"rule_order", where + "/traversal_rule/" + std::to_string(s),
                       "traversal step after a terminal step"});
        break;
      }
    }
  }
  return out;
}

} // namespace mlprov::kb
