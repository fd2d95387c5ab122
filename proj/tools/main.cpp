// Command-line front end: analyze single scripts, run corpora, score
// predictions against ground truth, validate knowledge bases, and time
// the pipeline stages.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mlprov/harness.hpp"
#include "mlprov/kb.hpp"

namespace {

int run_analyze(const std::string &file, const std::string &kb_path, bool dump_wir,
                bool dump_annotations, const std::string &out, const std::string &format,
                bool require_model) {
  mlprov::kb::KnowledgeBase kb;
  try {
    kb = mlprov::kb::load_kb(kb_path);
  } catch (const mlprov::KbFormatError &e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  mlprov::harness::AnalyzeOptions options;
  options.dump_wir = dump_wir;
  options.dump_annotations = dump_annotations;
  mlprov::harness::AnalysisResult result = mlprov::harness::analyze_file(file, kb, options);

  for (const auto &d : result.diagnostics)
    std::cerr << d.stage << ":" << d.code << " line " << d.line << ": " << d.message << "\n";
  for (const auto &d : result.diagnostics)
    if (d.code == "io_error") return 1;
  if (dump_wir) std::cout << result.wir_dump << "\n";
  if (dump_annotations) std::cout << result.annotation_dump << "\n";

  std::string rendered = (format == "json")
                             ? mlprov::track::serialize_records(result.records)
                             : mlprov::track::records_to_text(result.records);
  if (!out.empty()) {
    std::ofstream os(out);
    os << mlprov::track::serialize_records(result.records) << "\n";
  }
  if (!dump_wir && !dump_annotations) std::cout << rendered;
  if (format == "json" && !dump_wir && !dump_annotations) std::cout << "\n";
  if (require_model && result.records.empty()) return 2;
  return 0;
}

int run_corpus(const std::string &dir, const std::string &kb_path, const std::string &report,
               int jobs, std::string out_dir) {
  mlprov::kb::KnowledgeBase kb;
  try {
    kb = mlprov::kb::load_kb(kb_path);
  } catch (const mlprov::KbFormatError &e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  if (out_dir.empty()) {
    std::filesystem::path base(report);
    out_dir = base.parent_path() / (base.stem().string() + ".records");
  }
  mlprov::harness::CorpusResult result =
      mlprov::harness::analyze_corpus(dir, kb, jobs, out_dir);
  std::ofstream os(report);
  if (!os) {
    std::cerr << "cannot write " << report << "\n";
    return 1;
  }
  os << result.summary_json << "\n";
  const auto &r = result.report;
  std::cout << "scripts " << r.n_scripts << " | wir " << r.wir_ok << " | models "
            << r.model_found << " | train datasets " << r.train_dataset_found
            << " | non-empty columns " << r.nonempty_columns << "\n";
  return 0;
}

int run_score(const std::string &pred, const std::string &truth, const std::string &format) {
  try {
    mlprov::harness::ScoreReport report = mlprov::harness::score(pred, truth);
    std::cout << (format == "json" ? mlprov::harness::score_to_json(report) + "\n"
                                   : mlprov::harness::score_to_text(report));
    return 0;
  } catch (const mlprov::TruthFormatError &e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int run_kb_validate(const std::string &file) {
  try {
    mlprov::kb::KnowledgeBase kb = mlprov::kb::load_kb(file);
    auto diagnostics = mlprov::kb::validate_kb(kb);
    for (const auto &d : diagnostics)
      std::cerr << d.code << " at " << d.where << ": " << d.message << "\n";
    if (!diagnostics.empty()) return 1;
    std::cout << "ok: " << kb.api_facts.size() << " api facts, " << kb.tracker_facts.size()
              << " tracker facts\n";
    return 0;
  } catch (const mlprov::KbFormatError &e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

int run_bench(const std::string &file, const std::string &kb_path, int reps) {
  mlprov::kb::KnowledgeBase kb;
  try {
    kb = mlprov::kb::load_kb(kb_path);
  } catch (const mlprov::KbFormatError &e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  mlprov::harness::StageTimings t = mlprov::harness::time_stages(file, kb, reps);
  std::cout << mlprov::harness::timings_to_json(t) << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Static provenance extraction for Python data-science scripts"};
  app.require_subcommand(1);

  std::string file, kb_path, out, format = "text", dir, report, pred, truth, validate_file;
  bool dump_wir = false, dump_annotations = false, require_model = false;
  int jobs = 1, reps = 5;
  std::string out_dir;

  CLI::App *analyze = app.add_subcommand("analyze", "Analyze one script");
  analyze->add_option("file", file)->required();
  analyze->add_option("--kb", kb_path)->required();
  analyze->add_flag("--dump-wir", dump_wir);
  analyze->add_flag("--dump-annotations", dump_annotations);
  analyze->add_option("--out", out);
  analyze->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
  analyze->add_flag("--require-model", require_model);

  CLI::App *corpus = app.add_subcommand("corpus", "Analyze every .py file in a directory");
  corpus->add_option("dir", dir)->required();
  corpus->add_option("--kb", kb_path)->required();
  corpus->add_option("--report", report)->required();
  corpus->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  corpus->add_option("--out-dir", out_dir);

  CLI::App *score_cmd = app.add_subcommand("score", "Score predictions against ground truth");
  score_cmd->add_option("--pred", pred)->required();
  score_cmd->add_option("--truth", truth)->required();
  score_cmd->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));

  CLI::App *kb_cmd = app.add_subcommand("kb", "Knowledge-base utilities");
  CLI::App *kb_validate = kb_cmd->add_subcommand("validate", "Validate a KB file");
  kb_validate->add_option("file", validate_file)->required();

  CLI::App *bench = app.add_subcommand("bench", "Time the pipeline stages");
  bench->add_option("file", file)->required();
  bench->add_option("--kb", kb_path)->required();
  bench->add_option("--reps", reps)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  if (analyze->parsed())
    return run_analyze(file, kb_path, dump_wir, dump_annotations, out, format, require_model);
  if (corpus->parsed()) return run_corpus(dir, kb_path, report, jobs, out_dir);
  if (score_cmd->parsed()) return run_score(pred, truth, format);
  if (kb_cmd->parsed()) {
    if (kb_validate->parsed()) return run_kb_validate(validate_file);
    std::cerr << "usage: kb validate <file>\n";
    return 1;
  }
  if (bench->parsed()) return run_bench(file, kb_path, reps);
  return 1;
}
