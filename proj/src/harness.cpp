#include "mlprov/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mlprov/annotate.hpp"
#include "mlprov/lowering.hpp"
#include "mlprov/parser.hpp"

namespace mlprov::harness {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::optional<std::string> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

AnalysisResult analyze_source(const std::string &source, const std::string &path,
                              const kb::KnowledgeBase &kb, const AnalyzeOptions &options) {
  AnalysisResult result;
  result.script_path = path;
  auto total_start = Clock::now();

  auto stage_start = Clock::now();
  py::ParseResult parsed = py::parse_script(source, path);
  result.timings.parse_ms = ms_since(stage_start);
  if (!parsed.ok()) {
    const auto &e = *parsed.error;
    result.diagnostics.push_back({"parse", e.encoding ? "encoding_error" : "parse_error",
                                  e.message, e.line});
    result.timings.total_ms = ms_since(total_start);
    return result;
  }
  result.parsed = true;
  py::ParseDiagnostics unsupported = py::scan_unsupported(*parsed.ast);
  for (const auto &u : unsupported.unsupported)
    result.diagnostics.push_back(
        {"parse", "unsupported_construct", u.kind_name + " is not analyzed", u.line});

  wir::PrProgram program;
  stage_start = Clock::now();
  try {
    program = wir::gen_prs(*parsed.ast);
    result.timings.pr_gen_ms = ms_since(stage_start);
  } catch (const LoweringError &e) {
    result.timings.pr_gen_ms = ms_since(stage_start);
    result.diagnostics.push_back({"pr_gen", "internal_lowering", e.what(), e.line()});
    result.timings.total_ms = ms_since(total_start);
    return result;
  }

  wir::Wir graph;
  stage_start = Clock::now();
  try {
    graph = wir::compose(std::move(program));
    result.timings.wir_compose_ms = ms_since(stage_start);
  } catch (const LoweringError &e) {
    result.timings.wir_compose_ms = ms_since(stage_start);
    result.diagnostics.push_back({"wir_compose", "internal_lowering", e.what(), e.line()});
    result.timings.total_ms = ms_since(total_start);
    return result;
  }
  result.wir_ok = true;

  stage_start = Clock::now();
  annotate::AnnotatedWir annotated = annotate::annotate(std::move(graph), kb);
  result.timings.annotate_ms = ms_since(stage_start);
  if (annotated.stats.iteration_cap_hit)
    result.diagnostics.push_back(
        {"annotate", "iteration_cap", "annotation stopped at the iteration cap", 0});

  stage_start = Clock::now();
  track::TrackResult tracked = track::track(annotated, kb, path);
  result.timings.track_ms = ms_since(stage_start);
  for (const auto &d : tracked.diagnostics)
    result.diagnostics.push_back({"track", d.code, d.message, d.line});
  result.records = std::move(tracked.records);

  bool any_model = false, any_dataset = false;
  for (const auto &v : annotated.wir.vars) {
    if (v.has_role(Role::Model) || v.has_role(Role::TrainedModel)) any_model = true;
    if (v.has_role(Role::TrainDataset)) any_dataset = true;
  }
  result.model_found = any_model;
  result.train_dataset_found = any_model && any_dataset;
  bool any_columns = false;
  for (const auto &rec : result.records)
    if (!rec.feature_columns.empty() || !rec.label_columns.empty()) any_columns = true;
  result.nonempty_columns = result.train_dataset_found && any_columns;

  if (options.dump_wir) result.wir_dump = wir::serialize_wir(annotated.wir);
  if (options.dump_annotations) result.annotation_dump = annotate::serialize_annotations(annotated);

  result.timings.total_ms = ms_since(total_start);
  return result;
}

AnalysisResult analyze_file(const std::string &path, const kb::KnowledgeBase &kb,
                            const AnalyzeOptions &options) {
  auto source = read_file(path);
  if (!source) {
    AnalysisResult result;
    result.script_path = path;
    result.diagnostics.push_back({"parse", "io_error", "cannot read " + path, 0});
    return result;
  }
  return analyze_source(*source, path, kb, options);
}

namespace {

ordered_json coverage_to_json(const CoverageReport &r) {
  ordered_json j;
  j["n_scripts"] = r.n_scripts;
  j["wir_ok"] = r.wir_ok;
  j["model_found"] = r.model_found;
  j["train_dataset_found"] = r.train_dataset_found;
  j["nonempty_columns"] = r.nonempty_columns;
  ordered_json diags = ordered_json::object();
  for (const auto &[code, count] : r.diagnostics) diags[code] = count;
  j["diagnostics"] = std::move(diags);
  return j;
}

} // namespace

CorpusResult analyze_corpus(const std::string &dir, const kb::KnowledgeBase &kb, int jobs,
                            const std::optional<std::string> &out_dir) {
  CorpusResult result;
  std::vector<std::string> paths;
  if (fs::exists(dir)) {
    for (const auto &entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".py")
        paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());

  result.per_script.resize(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= paths.size()) break;
      result.per_script[i] = analyze_file(paths[i], kb);
    }
  };
  int n_threads = std::max(1, jobs);
  if (n_threads == 1 || paths.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }

  CoverageReport &report = result.report;
  report.n_scripts = static_cast<int>(paths.size());
  for (const auto &r : result.per_script) {
    report.wir_ok += r.wir_ok ? 1 : 0;
    report.model_found += r.model_found ? 1 : 0;
    report.train_dataset_found += r.train_dataset_found ? 1 : 0;
    report.nonempty_columns += r.nonempty_columns ? 1 : 0;
    for (const auto &d : r.diagnostics) ++report.diagnostics[d.code];
  }

  if (out_dir) {
    fs::create_directories(*out_dir);
    for (const auto &r : result.per_script) {
      fs::path stem = fs::path(r.script_path).stem();
      std::ofstream out(fs::path(*out_dir) / (stem.string() + ".prov.json"));
      out << track::serialize_records(r.records) << "\n";
    }
  }

  ordered_json summary = coverage_to_json(report);
  summary["scripts"] = ordered_json::array();
  for (const auto &r : result.per_script) {
    ordered_json js;
    js["path"] = fs::path(r.script_path).filename().string();
    js["wir_ok"] = r.wir_ok;
    js["model_found"] = r.model_found;
    js["train_dataset_found"] = r.train_dataset_found;
    js["nonempty_columns"] = r.nonempty_columns;
    js["records"] = static_cast<int>(r.records.size());
    ordered_json diags = ordered_json::object();
    std::map<std::string, int> counts;
    for (const auto &d : r.diagnostics) ++counts[d.code];
    for (const auto &[code, count] : counts) diags[code] = count;
    js["diagnostics"] = std::move(diags);
    summary["scripts"].push_back(std::move(js));
  }
  result.summary_json = summary.dump(2);
  return result;
}

GroundTruth load_truth(const std::string &path) {
  auto text = read_file(path);
  if (!text) throw TruthFormatError("cannot read " + path);
  nlohmann::json doc = nlohmann::json::parse(*text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw TruthFormatError(path + " is not a JSON object");
  GroundTruth t;
  t.script_path = doc.value("script_path", "");
  auto strings = [&](const char *key, std::vector<std::string> &out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_array()) throw TruthFormatError(path + ": " + key + " must be an array");
    for (const auto &s : doc[key]) out.push_back(s.get<std::string>());
  };
  strings("model_vars", t.model_vars);
  strings("data_sources", t.data_sources);
  auto refs = [&](const char *key, std::vector<track::ColumnRef> &out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_array()) throw TruthFormatError(path + ": " + key + " must be an array");
    for (const auto &r : doc[key]) out.push_back(track::parse_column_ref_json(r.dump()));
  };
  refs("feature_included", t.feature_included);
  refs("feature_excluded", t.feature_excluded);
  refs("label_included", t.label_included);
  refs("label_excluded", t.label_excluded);
  return t;
}

namespace {

template <typename T>
struct PrAccumulator {
  double p_sum = 0;
  int p_n = 0;
  double r_sum = 0;
  int r_n = 0;

  void add(std::vector<T> pred, std::vector<T> truth) {
    std::sort(pred.begin(), pred.end());
    pred.erase(std::unique(pred.begin(), pred.end()), pred.end());
    std::sort(truth.begin(), truth.end());
    truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
    std::vector<T> both;
    std::set_intersection(pred.begin(), pred.end(), truth.begin(), truth.end(),
                          std::back_inserter(both));
    if (pred.empty() && truth.empty()) {
      p_sum += 1.0;
      ++p_n;
      r_sum += 1.0;
      ++r_n;
      return;
    }
    if (pred.empty()) {
      // precision undefined and excluded; the miss shows up in recall
      r_sum += 0.0;
      ++r_n;
      return;
    }
    if (truth.empty()) {
      p_sum += 0.0;
      ++p_n;
      return;
    }
    p_sum += static_cast<double>(both.size()) / pred.size();
    ++p_n;
    r_sum += static_cast<double>(both.size()) / truth.size();
    ++r_n;
  }

  PrAverage average() const {
    PrAverage out;
    out.precision = p_n ? p_sum / p_n : 1.0;
    out.recall = r_n ? r_sum / r_n : 1.0;
    out.precision_defined = p_n;
    out.recall_defined = r_n;
    return out;
  }
};

} // namespace

ScoreReport score(const std::string &pred_dir, const std::string &truth_dir) {
  std::vector<std::string> truth_files;
  if (fs::exists(truth_dir)) {
    for (const auto &entry : fs::directory_iterator(truth_dir)) {
      std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.size() > 11 &&
          name.substr(name.size() - 11) == ".truth.json")
        truth_files.push_back(entry.path().string());
    }
  }
  std::sort(truth_files.begin(), truth_files.end());

  ScoreReport report;
  PrAccumulator<track::ColumnRef> feature_excl, feature_incl, label_incl;
  PrAccumulator<std::string> model_acc, dataset_acc;

  for (const auto &truth_path : truth_files) {
    GroundTruth truth = load_truth(truth_path);
    std::string stem = fs::path(truth_path).filename().string();
    stem = stem.substr(0, stem.size() - 11);
    fs::path pred_path = fs::path(pred_dir) / (stem + ".prov.json");
    auto pred_text = read_file(pred_path.string());
    if (!pred_text)
      throw TruthFormatError("missing prediction file " + pred_path.string());
    std::vector<track::ProvenanceRecord> records = track::parse_records(*pred_text);

    std::vector<track::ColumnRef> p_fi, p_fe, p_li;
    std::vector<std::string> p_models, p_sources;
    for (const auto &rec : records) {
      p_models.push_back(rec.model_var);
      for (const auto &s : rec.data_sources) p_sources.push_back(s);
      for (const auto &r : rec.feature_columns.included) p_fi.push_back(r);
      for (const auto &r : rec.feature_columns.excluded) p_fe.push_back(r);
      for (const auto &r : rec.label_columns.included) p_li.push_back(r);
    }
    feature_excl.add(p_fe, truth.feature_excluded);
    feature_incl.add(p_fi, truth.feature_included);
    label_incl.add(p_li, truth.label_included);
    model_acc.add(p_models, truth.model_vars);
    dataset_acc.add(p_sources, truth.data_sources);
    ++report.n_scripts;
  }

  report.feature_exclusion = feature_excl.average();
  report.feature_inclusion = feature_incl.average();
  report.label_inclusion = label_incl.average();
  report.model_precision = model_acc.average().precision;
  report.train_dataset_precision = dataset_acc.average().precision;
  return report;
}

std::string score_to_json(const ScoreReport &r) {
  ordered_json j;
  j["n_scripts"] = r.n_scripts;
  auto pr = [](const PrAverage &a) {
    return ordered_json{{"precision", a.precision}, {"recall", a.recall}};
  };
  j["feature_exclusion"] = pr(r.feature_exclusion);
  j["feature_inclusion"] = pr(r.feature_inclusion);
  j["label_inclusion"] = pr(r.label_inclusion);
  j["annotation_precision"] = {{"model", r.model_precision},
                               {"train_dataset", r.train_dataset_precision}};
  return j.dump(2);
}

std::string score_to_text(const ScoreReport &r) {
  std::ostringstream os;
  os << "scripts scored: " << r.n_scripts << "\n";
  auto line = [&](const char *name, const PrAverage &a) {
    os << name << ": precision " << a.precision << " recall " << a.recall << "\n";
  };
  line("feature_exclusion", r.feature_exclusion);
  line("feature_inclusion", r.feature_inclusion);
  line("label_inclusion", r.label_inclusion);
  os << "annotation precision: model " << r.model_precision << ", train_dataset "
     << r.train_dataset_precision << "\n";
  return os.str();
}

StageTimings time_stages(const std::string &path, const kb::KnowledgeBase &kb, int repetitions) {
  repetitions = std::max(1, repetitions);
  auto source = read_file(path);
  std::vector<StageTimings> runs;
  for (int i = 0; i < repetitions; ++i) {
    AnalysisResult r = source ? analyze_source(*source, path, kb) : AnalysisResult{};
    runs.push_back(r.timings);
  }
  if (repetitions >= 3) runs.erase(runs.begin());   // drop the cold run

  auto median_of = [&](auto field) {
    std::vector<double> values;
    for (const auto &t : runs) values.push_back(t.*field);
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  };
  StageTimings out;
  out.parse_ms = median_of(&StageTimings::parse_ms);
  out.pr_gen_ms = median_of(&StageTimings::pr_gen_ms);
  out.wir_compose_ms = median_of(&StageTimings::wir_compose_ms);
  out.annotate_ms = median_of(&StageTimings::annotate_ms);
  out.track_ms = median_of(&StageTimings::track_ms);
  out.total_ms = median_of(&StageTimings::total_ms);
  return out;
}

std::string timings_to_json(const StageTimings &t) {
  ordered_json j;
  j["parse_ms"] = t.parse_ms;
  j["pr_gen_ms"] = t.pr_gen_ms;
  j["wir_compose_ms"] = t.wir_compose_ms;
  j["annotate_ms"] = t.annotate_ms;
  j["track_ms"] = t.track_ms;
  j["total_ms"] = t.total_ms;
  return j.dump(2);
}

} // namespace mlprov::harness
