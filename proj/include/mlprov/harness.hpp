#ifndef MLPROV_HARNESS_HPP_
#define MLPROV_HARNESS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlprov/kb.hpp"
#include "mlprov/tracker.hpp"

namespace mlprov::harness {

struct StageTimings {
  double parse_ms = 0;
  double pr_gen_ms = 0;
  double wir_compose_ms = 0;
  double annotate_ms = 0;
  double track_ms = 0;
  double total_ms = 0;
};

struct StageDiagnostic {
  std::string stage;     // parse, pr_gen, wir_compose, annotate, track
  std::string code;
  std::string message;
  int line = 0;
};

struct AnalyzeOptions {
  bool dump_wir = false;
  bool dump_annotations = false;
};

struct AnalysisResult {
  std::string script_path;
  bool parsed = false;
  bool wir_ok = false;
  bool model_found = false;
  bool train_dataset_found = false;   // counted only when a model was found
  bool nonempty_columns = false;      // counted only when a dataset was found
  std::vector<track::ProvenanceRecord> records;
  std::vector<StageDiagnostic> diagnostics;
  StageTimings timings;
  std::string wir_dump;
  std::string annotation_dump;
};

// Full pipeline over one script: parse, PR generation, WIR composition,
// annotation, tracking. Per-stage failures abort later stages but always
// leave timings and a tagged diagnostic behind.
AnalysisResult analyze_source(const std::string &source, const std::string &path,
                              const kb::KnowledgeBase &kb, const AnalyzeOptions &options = {});
AnalysisResult analyze_file(const std::string &path, const kb::KnowledgeBase &kb,
                            const AnalyzeOptions &options = {});

// Pipeline funnel over a corpus. Stages are cumulative, so the counts are
// monotonically non-increasing.
struct CoverageReport {
  int n_scripts = 0;
  int wir_ok = 0;
  int model_found = 0;
  int train_dataset_found = 0;
  int nonempty_columns = 0;
  std::map<std::string, int> diagnostics;   // code -> occurrences

  bool funnel_monotone() const {
    return n_scripts >= wir_ok && wir_ok >= model_found &&
           model_found >= train_dataset_found && train_dataset_found >= nonempty_columns;
  }
};

struct CorpusResult {
  CoverageReport report;
  std::vector<AnalysisResult> per_script;   // sorted by path
  std::string summary_json;                 // deterministic; carries no timings
};

// Analyzes every .py file under `dir` with a pool of `jobs` workers.
// When `out_dir` is given, writes one <stem>.prov.json per script.
CorpusResult analyze_corpus(const std::string &dir, const kb::KnowledgeBase &kb, int jobs = 1,
                            const std::optional<std::string> &out_dir = std::nullopt);

struct GroundTruth {
  std::string script_path;
  std::vector<std::string> model_vars;
  std::vector<std::string> data_sources;
  std::vector<track::ColumnRef> feature_included;
  std::vector<track::ColumnRef> feature_excluded;
  std::vector<track::ColumnRef> label_included;
  std::vector<track::ColumnRef> label_excluded;
};

GroundTruth load_truth(const std::string &path);

// Precision/recall of one category, averaged over the scripts where the
// value is defined. Empty prediction with non-empty truth leaves precision
// undefined (excluded from the average); the miss lands on recall.
struct PrAverage {
  double precision = 1.0;
  double recall = 1.0;
  int precision_defined = 0;
  int recall_defined = 0;
};

struct ScoreReport {
  int n_scripts = 0;
  PrAverage feature_exclusion;
  PrAverage feature_inclusion;
  PrAverage label_inclusion;
  double model_precision = 1.0;
  double train_dataset_precision = 1.0;
};

// Scores stored predictions (<stem>.prov.json) against ground truth
// files (<stem>.truth.json).
ScoreReport score(const std::string &pred_dir, const std::string &truth_dir);
std::string score_to_json(const ScoreReport &report);
std::string score_to_text(const ScoreReport &report);

// Median per-stage wall clock over `repetitions` runs; the cold first run
// is dropped when repetitions >= 3.
StageTimings time_stages(const std::string &path, const kb::KnowledgeBase &kb, int repetitions);

std::string timings_to_json(const StageTimings &t);

} // namespace mlprov::harness

#endif // MLPROV_HARNESS_HPP_
