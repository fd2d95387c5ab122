#ifndef MLPROV_ANNOTATE_HPP_
#define MLPROV_ANNOTATE_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mlprov/kb.hpp"
#include "mlprov/wir.hpp"

namespace mlprov::annotate {

struct ImportSeed {
  int pr_index = -1;
  std::string library;
  std::string module;   // empty when the import has no module path
};

struct LibraryRef {
  std::string library;
  std::string module;

  bool operator==(const LibraryRef &) const = default;
};

struct AnnotationStats {
  int iterations = 0;
  int forward_traversals = 0;
  int backward_traversals = 0;
  int annotations_assigned = 0;
  std::size_t max_edges_visited = 0;   // largest single-DFS edge count
  bool iteration_cap_hit = false;
};

struct AnnotatedWir {
  wir::Wir wir;
  // Local alias -> (library, module), from the import statements.
  std::map<std::string, LibraryRef> import_bindings;
  AnnotationStats stats;
  // Outputs of data-source-reading operations (read_csv and friends),
  // recorded for train-dataset derivation and source resolution.
  std::set<wir::NodeId> source_outputs;
};

// Import PRs in script order, with the library and module they pull in.
std::vector<ImportSeed> collect_import_seeds(const wir::Wir &w);

// Seeds from the Import PRs, then repeated forward DFS over the graph
// consulting the KB at each operation; every input that gains a role
// starts a backward DFS. Repeats until an iteration assigns nothing new,
// capped at |V| iterations.
AnnotatedWir annotate(wir::Wir w, const kb::KnowledgeBase &kb);

// Maps the leading name of the operation's qualifier through the import
// bindings; nullopt when the root is not an imported name.
std::optional<LibraryRef> resolve_call_library(const AnnotatedWir &aw, const wir::OpNode &op);

// JSON list of annotated variables (name/id, roles, origins).
std::string serialize_annotations(const AnnotatedWir &aw);

} // namespace mlprov::annotate

#endif // MLPROV_ANNOTATE_HPP_
