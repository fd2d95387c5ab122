#ifndef MLPROV_TRACKER_HPP_
#define MLPROV_TRACKER_HPP_

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mlprov/annotate.hpp"
#include "mlprov/kb.hpp"

namespace mlprov::track {

// One end of a column range. Negative script indices are kept symbolic
// (end - k); a bound that is not a constant is recorded as unknown.
struct Bound {
  enum class Kind { Unbounded, Finite, EndOffset, Unknown };
  Kind kind = Kind::Unbounded;
  std::int64_t value = 0;

  static Bound unbounded() { return {}; }
  static Bound finite(std::int64_t v) { return {Kind::Finite, v}; }
  static Bound end_offset(std::int64_t k) { return {Kind::EndOffset, k}; }
  static Bound unknown() { return {Kind::Unknown, 0}; }
  static Bound from_index(std::int64_t v) {
    return v < 0 ? end_offset(-v) : finite(v);
  }

  auto operator<=>(const Bound &) const = default;
  std::string text(const char *when_unbounded) const;
};

struct ColumnRef {
  enum class Kind { Name, Index, Range };
  Kind kind = Kind::Name;
  std::string name;
  std::int64_t index = 0;
  Bound lower, upper, step;

  static ColumnRef name_ref(std::string n);
  static ColumnRef index_ref(std::int64_t i);
  static ColumnRef range_ref(Bound lo, Bound up, Bound st = Bound::unbounded());

  auto operator<=>(const ColumnRef &) const = default;
  std::string text() const;
};

// Inclusion set C+ and exclusion set C-. An empty C+ means no explicit
// selection was found (unrestricted), not zero columns.
struct ColumnSets {
  std::vector<ColumnRef> included;
  std::vector<ColumnRef> excluded;

  // Keeps both sides sorted and unique; a literal name later added to the
  // opposite side supersedes the earlier entry.
  void add(const ColumnRef &ref, bool exclusion);
  bool empty() const { return included.empty() && excluded.empty(); }
};

struct ProvenanceRecord {
  std::string model_var;
  std::string model_api;
  std::vector<std::string> data_sources;   // sorted; <dynamic> when unresolved
  ColumnSets feature_columns;
  ColumnSets label_columns;
  std::string script_path;
};

struct Diagnostic {
  std::string code;      // traversal_dead_end, non_constant_bound, ...
  std::string message;
  int line = 0;
};

// Per-member provenance, kept so tests can assert that exclusion entries
// only come from exclusion facts.
struct MemberLog {
  ColumnRef ref;
  Role target = Role::Features;
  bool from_exclusion_fact = false;
  std::string op_name;
};

struct TrackResult {
  std::vector<ProvenanceRecord> records;
  std::vector<Diagnostic> diagnostics;
  std::vector<MemberLog> member_log;
  int max_guide_depth = 0;
};

// Scans the PRs of the annotated graph, runs the guided traversals for
// every column-selection operation touching features or labels, and
// produces one record per trained model.
TrackResult track(const annotate::AnnotatedWir &aw, const kb::KnowledgeBase &kb,
                  const std::string &script_path);

// Constant source strings of every data-reading operation; <dynamic> for
// non-constant arguments.
std::set<std::string> resolve_data_sources(const annotate::AnnotatedWir &aw);

std::string serialize_records(const std::vector<ProvenanceRecord> &records);
std::string records_to_text(const std::vector<ProvenanceRecord> &records);

// Inverse of serialize_records, used when scoring stored predictions.
std::vector<ProvenanceRecord> parse_records(const std::string &json_text);
// Parses one column reference from its JSON object form; throws
// TruthFormatError on malformed input.
ColumnRef parse_column_ref_json(const std::string &json_text);

} // namespace mlprov::track

#endif // MLPROV_TRACKER_HPP_
