#ifndef MLPROV_KB_HPP_
#define MLPROV_KB_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mlprov/errors.hpp"
#include "mlprov/literal.hpp"
#include "mlprov/roles.hpp"

namespace mlprov::kb {

// Where an input role binds: a 1-based position, a keyword argument, the
// caller, or a variadic tail covering all remaining positional inputs.
struct Slot {
  enum class Kind { Position, Keyword, Caller, Variadic };
  Kind kind = Kind::Position;
  int position = 0;
  std::string keyword;

  static std::optional<Slot> parse(const std::string &text);
  std::string text() const;
  auto operator<=>(const Slot &) const = default;
};

// One API fact: roles of an operation's inputs and outputs, optionally
// constrained by module and by a role the caller must carry.
struct KbFact {
  std::string library;
  std::optional<std::string> module;
  std::optional<Role> caller;
  std::string api_name;
  std::vector<std::pair<Slot, Role>> input_roles;
  std::vector<Role> output_roles;

  bool operator==(const KbFact &) const = default;
};

struct TraversalStep {
  enum class Kind { FollowInput, FollowCaller, CollectConstants, InterpretSlice, RecurseAllInputs };
  Kind kind = Kind::CollectConstants;
  int position = 1;   // FollowInput only, 1-based

  bool terminal() const {
    return kind == Kind::CollectConstants || kind == Kind::InterpretSlice;
  }
  bool operator==(const TraversalStep &) const = default;
};

// One alternative of a tracker-fact condition; the condition holds when
// any clause does. A clause without `equals` only requires the keyword
// to be present.
struct ConditionClause {
  std::string key;
  std::optional<Literal> equals;

  bool operator==(const ConditionClause &) const = default;
};

// Column-selection behaviour of one operation: whether it excludes
// columns and how to walk backward to the selected constants.
struct TrackerFact {
  std::string op_matcher;
  std::vector<ConditionClause> condition;   // empty = unconditional
  bool column_exclusion = false;
  std::vector<TraversalStep> traversal_rule;

  bool operator==(const TrackerFact &) const = default;
};

struct KnowledgeBase {
  std::string version;
  std::vector<KbFact> api_facts;
  std::vector<TrackerFact> tracker_facts;

  bool operator==(const KnowledgeBase &) const = default;

  // Operation names whose facts emit the given output role.
  std::set<std::string> ops_emitting(Role role) const;
  // Operations that read an external data source (a data_source input).
  bool is_data_source_op(const std::string &op_name) const;
};

// Loads and validates a KB file; throws KbFormatError with a JSON pointer
// to the offending entry. Duplicate-key facts are rejected.
KnowledgeBase load_kb(const std::string &path);
KnowledgeBase parse_kb(const std::string &json_text);
std::string serialize_kb(const KnowledgeBase &kb);

// Most specific fact for (library, module, caller roles, operation):
// module+caller > caller > module > library-only. Returns nullptr when
// nothing matches.
const KbFact *query_api(const KnowledgeBase &kb, const std::string &library,
                        const std::optional<std::string> &module,
                        const std::set<Role> &caller_roles, const std::string &op_name);

struct BackwardBinding {
  Slot slot;
  Role role;
};

// Input-role bindings for facts whose output roles are consistent with
// the roles observed on an operation's outputs; nullopt when no fact
// matches.
std::optional<std::vector<BackwardBinding>> query_backward(
    const KnowledgeBase &kb, const std::vector<std::set<Role>> &observed_output_roles,
    const std::string &op_name);

// Keyword arguments visible to tracker conditions: present keys map to
// their constant value when known.
using KeywordView = std::map<std::string, std::optional<Literal>>;

const TrackerFact *query_tracker(const KnowledgeBase &kb, const std::string &op_name,
                                 const KeywordView &keyword_args);

struct KbDiagnostic {
  std::string code;      // duplicate_fact, unreachable_fact, rule_order, ...
  std::string where;     // JSON-pointer-style location
  std::string message;
};

// Non-fatal structural checks; an empty result means the KB is clean.
std::vector<KbDiagnostic> validate_kb(const KnowledgeBase &kb);

} // namespace mlprov::kb

#endif // MLPROV_KB_HPP_
