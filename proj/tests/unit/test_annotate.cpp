#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "mlprov/annotate.hpp"
#include "mlprov/lowering.hpp"
#include "mlprov/parser.hpp"

using namespace mlprov;
using mlprov::annotate::AnnotatedWir;
using mlprov::annotate::ImportSeed;
using mlprov::annotate::collect_import_seeds;
using mlprov::annotate::resolve_call_library;
using mlprov::annotate::serialize_annotations;
using mlprov::wir::Wir;

namespace {

Wir build(const std::string &source) {
  py::ParseResult r = py::parse_script(source, "test.py");
  REQUIRE(r.ok());
  return wir::gen_wir(*r.ast);
}

AnnotatedWir annotate_source(const std::string &source, const kb::KnowledgeBase &kb) {
  return annotate::annotate(build(source), kb);
}

// Role sets of every version of a named variable.
std::vector<std::set<Role>> roles_by_name(const AnnotatedWir &aw, const std::string &name) {
  std::vector<std::set<Role>> out;
  for (const auto &v : aw.wir.vars) {
    if (v.name != name) continue;
    std::set<Role> roles;
    for (const auto &[r, o] : v.annotations) roles.insert(r);
    out.push_back(roles);
  }
  return out;
}

bool has_exact(const AnnotatedWir &aw, const std::string &name, std::set<Role> want) {
  for (const auto &roles : roles_by_name(aw, name))
    if (roles == want) return true;
  return false;
}

kb::KnowledgeBase bundled() { return kb::load_kb(testutil::kb_path()); }

} // namespace

TEST_CASE("import seeds come out in script order with modules split") {
  Wir w = build(testutil::read_file(testutil::fixture("heart_disease.py")));
  std::vector<ImportSeed> seeds = collect_import_seeds(w);
  REQUIRE(seeds.size() == 3);
  CHECK(seeds[0].library == "pandas");
  CHECK(seeds[0].module == "");
  CHECK(seeds[1].library == "catboost");
  CHECK(seeds[1].module == "");
  CHECK(seeds[2].library == "sklearn");
  CHECK(seeds[2].module == "model_selection");
}

TEST_CASE("no imports means no seeds") {
  Wir w = build("x = 1\ny = x + 2\n");
  CHECK(collect_import_seeds(w).empty());
}

TEST_CASE("aliased imports record the alias binding") {
  kb::KnowledgeBase kb = bundled();
  AnnotatedWir aw = annotate_source("import lightgbm as lgb\n", kb);
  REQUIRE(aw.import_bindings.count("lgb"));
  CHECK(aw.import_bindings.at("lgb").library == "lightgbm");
  CHECK(aw.import_bindings.at("lgb").module == "");
}

TEST_CASE("heart-disease annotation reproduces the reference walkthrough") {
  kb::KnowledgeBase kb = bundled();
  AnnotatedWir aw =
      annotate_source(testutil::read_file(testutil::fixture("heart_disease.py")), kb);

  CHECK(has_exact(aw, "clf", {Role::Model}));
  CHECK(has_exact(aw, "tmp_fit", {Role::TrainedModel}));
  CHECK(has_exact(aw, "train_x2", {Role::Features}));
  CHECK(has_exact(aw, "train_y2", {Role::Labels}));
  CHECK(has_exact(aw, "train_x", {Role::Features}));
  // Both versions of train_df end up annotated as features, nothing more.
  auto dfs = roles_by_name(aw, "train_df");
  REQUIRE(dfs.size() == 2);
  for (const auto &roles : dfs) CHECK(roles == std::set<Role>{Role::Features});
  // The split partners get the validation roles.
  CHECK(has_exact(aw, "test_x2", {Role::ValidationFeatures}));
  CHECK(has_exact(aw, "test_y2", {Role::ValidationLabels}));
}

TEST_CASE("imports without known calls annotate nothing") {
  kb::KnowledgeBase kb = bundled();
  AnnotatedWir aw = annotate_source("import numpy as np\nx = np.zeros(3)\n", kb);
  CHECK(aw.stats.annotations_assigned == 0);
  CHECK(aw.stats.backward_traversals == 0);
}

TEST_CASE("train dataset is derived across values and subscript hops") {
  kb::KnowledgeBase kb = bundled();
  AnnotatedWir aw =
      annotate_source(testutil::read_file(std::string(testutil::corpus_dir()) + "/mini_01.py"), kb);
  bool found = false;
  for (const auto &v : aw.wir.vars) {
    if (v.name == "tmp_read_csv") {
      CHECK(v.has_role(Role::TrainDataset));
      CHECK(v.has_role(Role::Dataframe));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("resolve_call_library maps aliases through the bindings") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import pandas as pd\n"
      "import sklearn\n"
      "df = pd.read_csv('a.csv')\n"
      "parts = sklearn.model_selection.train_test_split(df)\n"
      "out = foo()\n";
  AnnotatedWir aw = annotate_source(source, kb);

  auto op_named = [&](const std::string &name) -> const wir::OpNode & {
    for (const auto &o : aw.wir.ops)
      if (o.op_name == name) return o;
    FAIL("missing op");
    return aw.wir.ops[0];
  };
  auto read = resolve_call_library(aw, op_named("read_csv"));
  REQUIRE(read.has_value());
  CHECK(read->library == "pandas");
  CHECK(read->module == "");

  auto tts = resolve_call_library(aw, op_named("train_test_split"));
  REQUIRE(tts.has_value());
  CHECK(tts->library == "sklearn");
  CHECK(tts->module == "model_selection");

  CHECK(!resolve_call_library(aw, op_named("foo")).has_value());
}

TEST_CASE("fit on a caller without the model role annotates nothing") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import catboost\n"
      "encoder = make_encoder()\n"
      "encoder.fit(a, b)\n";
  AnnotatedWir aw = annotate_source(source, kb);
  for (const auto &v : aw.wir.vars) {
    CHECK(!v.has_role(Role::Features));
    CHECK(!v.has_role(Role::TrainedModel));
  }
}

TEST_CASE("annotation reaches a fixpoint and is stable") {
  kb::KnowledgeBase kb = bundled();
  for (const auto &path : testutil::corpus_scripts()) {
    std::string source = testutil::read_file(path);
    AnnotatedWir first = annotate_source(source, kb);
    AnnotatedWir again = annotate_source(source, kb);
    CHECK(serialize_annotations(first) == serialize_annotations(again));

    // Re-annotating an already annotated graph must not change anything:
    // annotation sets only grow, and the fixpoint has no growth left.
    AnnotatedWir rerun = annotate::annotate(first.wir, kb);
    CHECK(serialize_annotations(rerun) == serialize_annotations(first));
    CHECK(!first.stats.iteration_cap_hit);
  }
}

TEST_CASE("every traversal stays within the edge budget") {
  kb::KnowledgeBase kb = bundled();
  for (const auto &path : testutil::corpus_scripts()) {
    Wir w = build(testutil::read_file(path));
    std::size_t n_edges = w.edges.size();
    AnnotatedWir aw = annotate::annotate(std::move(w), kb);
    CHECK(aw.stats.max_edges_visited <= n_edges);
  }
}
