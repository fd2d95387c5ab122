#include <doctest.h>

#include "helpers.hpp"
#include "mlprov/annotate.hpp"
#include "mlprov/lowering.hpp"
#include "mlprov/parser.hpp"
#include "mlprov/tracker.hpp"

using namespace mlprov;
using mlprov::track::Bound;
using mlprov::track::ColumnRef;
using mlprov::track::ColumnSets;
using mlprov::track::ProvenanceRecord;
using mlprov::track::TrackResult;
using mlprov::track::parse_records;
using mlprov::track::resolve_data_sources;
using mlprov::track::serialize_records;

namespace {

kb::KnowledgeBase bundled() { return kb::load_kb(testutil::kb_path()); }

annotate::AnnotatedWir annotated_for(const std::string &source, const kb::KnowledgeBase &kb) {
  py::ParseResult r = py::parse_script(source, "test.py");
  REQUIRE(r.ok());
  return annotate::annotate(wir::gen_wir(*r.ast), kb);
}

TrackResult track_source(const std::string &source, const kb::KnowledgeBase &kb) {
  return track::track(annotated_for(source, kb), kb, "test.py");
}

} // namespace

TEST_CASE("heart-disease script produces the reference record") {
  kb::KnowledgeBase kb = bundled();
  TrackResult result =
      track_source(testutil::read_file(testutil::fixture("heart_disease.py")), kb);
  REQUIRE(result.records.size() == 1);
  const ProvenanceRecord &rec = result.records[0];
  CHECK(rec.model_var == "clf");
  CHECK(rec.model_api == "CatBoostClassifier");
  REQUIRE(rec.data_sources.size() == 1);
  CHECK(rec.data_sources[0] == "heart_disease.csv");

  REQUIRE(rec.feature_columns.included.size() == 1);
  CHECK(rec.feature_columns.included[0] ==
        ColumnRef::range_ref(Bound::finite(3), Bound::unbounded()));
  REQUIRE(rec.feature_columns.excluded.size() == 2);
  CHECK(rec.feature_columns.excluded[0] == ColumnRef::name_ref("SSN"));
  CHECK(rec.feature_columns.excluded[1] == ColumnRef::name_ref("Target"));

  REQUIRE(rec.label_columns.included.size() == 1);
  CHECK(rec.label_columns.included[0] == ColumnRef::name_ref("Target"));
  CHECK(rec.label_columns.excluded.empty());
}

TEST_CASE("drop with direct constant arguments lands in the exclusion set") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "df = pd.read_csv('d.csv')\n"
      "X = df.drop('junk', axis=1)\n"
      "y = df['y']\n"
      "clf = LogisticRegression()\n"
      "clf.fit(X, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  REQUIRE(result.records[0].feature_columns.excluded.size() == 1);
  CHECK(result.records[0].feature_columns.excluded[0] == ColumnRef::name_ref("junk"));
}

TEST_CASE("slice interpretation covers the bound shapes") {
  kb::KnowledgeBase kb = bundled();
  auto first_record = [&](const std::string &selection) {
    std::string source =
        "import pandas as pd\n"
        "from sklearn.linear_model import LogisticRegression\n"
        "df = pd.read_csv('d.csv')\n"
        "X = " + selection + "\n"
        "y = df['target']\n"
        "clf = LogisticRegression()\n"
        "clf.fit(X, y)\n";
    TrackResult result = track_source(source, kb);
    REQUIRE(result.records.size() == 1);
    return result.records[0];
  };

  SUBCASE("open upper bound") {
    auto rec = first_record("df.values[:, 3:]");
    REQUIRE(rec.feature_columns.included.size() == 1);
    CHECK(rec.feature_columns.included[0] ==
          ColumnRef::range_ref(Bound::finite(3), Bound::unbounded()));
  }
  SUBCASE("bounded range with step") {
    auto rec = first_record("df.values[:, 1:9:2]");
    REQUIRE(rec.feature_columns.included.size() == 1);
    CHECK(rec.feature_columns.included[0] ==
          ColumnRef::range_ref(Bound::finite(1), Bound::finite(9), Bound::finite(2)));
  }
  SUBCASE("full slice selects everything") {
    auto rec = first_record("df.values[:, :]");
    REQUIRE(rec.feature_columns.included.size() == 1);
    CHECK(rec.feature_columns.included[0] ==
          ColumnRef::range_ref(Bound::unbounded(), Bound::unbounded()));
  }
  SUBCASE("negative bound stays symbolic") {
    auto rec = first_record("df.values[:, :-1]");
    REQUIRE(rec.feature_columns.included.size() == 1);
    CHECK(rec.feature_columns.included[0] ==
          ColumnRef::range_ref(Bound::unbounded(), Bound::end_offset(1)));
  }
  SUBCASE("single index column") {
    auto rec = first_record("df.values[:, 0]");
    REQUIRE(rec.feature_columns.included.size() == 1);
    CHECK(rec.feature_columns.included[0] == ColumnRef::index_ref(0));
  }
  SUBCASE("one-dimensional slice without the row dimension") {
    auto rec = first_record("df[3:]");
    REQUIRE(rec.feature_columns.included.size() == 1);
    CHECK(rec.feature_columns.included[0] ==
          ColumnRef::range_ref(Bound::finite(3), Bound::unbounded()));
  }
}

TEST_CASE("selections through named constants and lists resolve") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "prices = pd.read_csv('hp.csv')\n"
      "target_col = 'SalePrice'\n"
      "drop_cols = ['Id', 'Pool']\n"
      "y = prices[target_col]\n"
      "X = prices.drop(drop_cols, axis=1)\n"
      "clf = LogisticRegression()\n"
      "clf.fit(X, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  const ProvenanceRecord &rec = result.records[0];
  REQUIRE(rec.label_columns.included.size() == 1);
  CHECK(rec.label_columns.included[0] == ColumnRef::name_ref("SalePrice"));
  REQUIRE(rec.feature_columns.excluded.size() == 2);
  CHECK(rec.feature_columns.excluded[0] == ColumnRef::name_ref("Id"));
  CHECK(rec.feature_columns.excluded[1] == ColumnRef::name_ref("Pool"));
}

TEST_CASE("a loop over constant column names excludes each of them") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "df = pd.read_csv('d.csv')\n"
      "for col in ['ts', 'uid']:\n"
      "    df = df.drop(col, axis=1)\n"
      "y = df['y']\n"
      "clf = LogisticRegression()\n"
      "clf.fit(df, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  const ColumnSets &f = result.records[0].feature_columns;
  REQUIRE(f.excluded.size() == 2);
  CHECK(f.excluded[0] == ColumnRef::name_ref("ts"));
  CHECK(f.excluded[1] == ColumnRef::name_ref("uid"));
}

TEST_CASE("features propagate backward through get_dummies") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "df = pd.read_csv('d.csv')\n"
      "X = pd.get_dummies(df.drop(['y'], axis=1))\n"
      "y = df['y']\n"
      "clf = LogisticRegression()\n"
      "clf.fit(X, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].data_sources == std::vector<std::string>{"d.csv"});
  REQUIRE(result.records[0].feature_columns.excluded.size() == 1);
  CHECK(result.records[0].feature_columns.excluded[0] == ColumnRef::name_ref("y"));
}

TEST_CASE("non-constant slice bounds are diagnosed, not guessed") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "df = pd.read_csv('d.csv')\n"
      "k = width()\n"
      "X = df.values[:, k:]\n"
      "y = df['target']\n"
      "clf = LogisticRegression()\n"
      "clf.fit(X, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  REQUIRE(result.records[0].feature_columns.included.size() == 1);
  CHECK(result.records[0].feature_columns.included[0].lower == Bound::unknown());
  bool diagnosed = false;
  for (const auto &d : result.diagnostics)
    if (d.code == "non_constant_bound") diagnosed = true;
  CHECK(diagnosed);
}

TEST_CASE("data sources resolve constants and flag dynamic paths") {
  kb::KnowledgeBase kb = bundled();
  SUBCASE("constant path") {
    auto aw = annotated_for(testutil::read_file(testutil::fixture("heart_disease.py")), kb);
    auto sources = resolve_data_sources(aw);
    CHECK(sources == std::set<std::string>{"heart_disease.csv"});
  }
  SUBCASE("variable path becomes <dynamic>") {
    std::string source =
        "import pandas as pd\n"
        "from sklearn.linear_model import LogisticRegression\n"
        "path = compute_path()\n"
        "df = pd.read_csv(path)\n"
        "clf = LogisticRegression()\n"
        "clf.fit(df, df['y'])\n";
    auto aw = annotated_for(source, kb);
    CHECK(resolve_data_sources(aw) == std::set<std::string>{"<dynamic>"});
  }
  SUBCASE("two files flowing into training are both reported") {
    std::string source = testutil::read_file(std::string(testutil::corpus_dir()) + "/mini_07.py");
    auto aw = annotated_for(source, kb);
    CHECK(resolve_data_sources(aw) == std::set<std::string>{"sales_q1.csv", "sales_q2.csv"});
  }
}

TEST_CASE("no selection operations leaves both sets empty") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "X = pd.read_csv('x.csv')\n"
      "y = pd.read_csv('y.csv')\n"
      "clf = LogisticRegression()\n"
      "clf.fit(X, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].feature_columns.empty());
  CHECK(result.records[0].label_columns.empty());
  CHECK(result.records[0].data_sources ==
        std::vector<std::string>{"x.csv", "y.csv"});
}

TEST_CASE("later exclusion of an included name supersedes it") {
  kb::KnowledgeBase kb = bundled();
  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "df = pd.read_csv('d.csv')\n"
      "X = df[['A', 'B']]\n"
      "X = X.drop(['A'], axis=1)\n"
      "y = df['target']\n"
      "clf = LogisticRegression()\n"
      "clf.fit(X, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  const ColumnSets &f = result.records[0].feature_columns;
  REQUIRE(f.included.size() == 1);
  CHECK(f.included[0] == ColumnRef::name_ref("B"));
  REQUIRE(f.excluded.size() == 1);
  CHECK(f.excluded[0] == ColumnRef::name_ref("A"));
}

TEST_CASE("exclusion entries only come from exclusion facts") {
  kb::KnowledgeBase kb = bundled();
  for (const auto &path : testutil::corpus_scripts()) {
    TrackResult result = track_source(testutil::read_file(path), kb);
    for (const auto &entry : result.member_log) {
      for (const auto &rec : result.records) {
        const ColumnSets &sets =
            entry.target == Role::Labels ? rec.label_columns : rec.feature_columns;
        bool in_excluded =
            std::find(sets.excluded.begin(), sets.excluded.end(), entry.ref) !=
            sets.excluded.end();
        if (in_excluded && !entry.from_exclusion_fact) {
          // An entry in the exclusion set must have at least one exclusion
          // fact origin in the log.
          bool excl_origin = false;
          for (const auto &other : result.member_log)
            if (other.ref == entry.ref && other.target == entry.target &&
                other.from_exclusion_fact)
              excl_origin = true;
          CHECK(excl_origin);
        }
      }
    }
  }
}

TEST_CASE("follow_caller steps walk the caller chain to constants") {
  kb::KnowledgeBase kb = bundled();
  kb::TrackerFact fact;
  fact.op_matcher = "take_from";
  fact.column_exclusion = false;
  fact.traversal_rule = {{kb::TraversalStep::Kind::FollowCaller, 1},
                         {kb::TraversalStep::Kind::CollectConstants, 1}};
  kb.tracker_facts.push_back(fact);

  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "df = pd.read_csv('d.csv')\n"
      "keep = ['a', 'b']\n"
      "X = keep.take_from(df)\n"
      "y = df['t']\n"
      "clf = LogisticRegression()\n"
      "clf.fit(X, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  const ColumnSets &f = result.records[0].feature_columns;
  REQUIRE(f.included.size() == 2);
  CHECK(f.included[0] == ColumnRef::name_ref("a"));
  CHECK(f.included[1] == ColumnRef::name_ref("b"));
}

TEST_CASE("recurse_all_inputs fans out into every input's selection") {
  kb::KnowledgeBase kb = bundled();
  kb::TrackerFact fact;
  fact.op_matcher = "assemble";
  fact.column_exclusion = false;
  fact.traversal_rule = {{kb::TraversalStep::Kind::RecurseAllInputs, 1}};
  kb.tracker_facts.push_back(fact);

  std::string source =
      "import pandas as pd\n"
      "from sklearn.linear_model import LogisticRegression\n"
      "df = pd.read_csv('d.csv')\n"
      "X = assemble(df[['a']], df[['b']])\n"
      "y = df['t']\n"
      "clf = LogisticRegression()\n"
      "clf.fit(X, y)\n";
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 1);
  const ColumnSets &f = result.records[0].feature_columns;
  REQUIRE(f.included.size() == 2);
  CHECK(f.included[0] == ColumnRef::name_ref("a"));
  CHECK(f.included[1] == ColumnRef::name_ref("b"));
}

TEST_CASE("guided traversal depth stays within the PR count") {
  kb::KnowledgeBase kb = bundled();
  for (const auto &path : testutil::corpus_scripts()) {
    auto aw = annotated_for(testutil::read_file(path), kb);
    std::size_t n_prs = aw.wir.prs.size();
    TrackResult result = track::track(aw, kb, path);
    CHECK(result.max_guide_depth <= static_cast<int>(n_prs));
  }
}

TEST_CASE("tracking is deterministic") {
  kb::KnowledgeBase kb = bundled();
  std::string source = testutil::read_file(testutil::fixture("job_slowdown.py"));
  auto aw1 = annotated_for(source, kb);
  auto aw2 = annotated_for(source, kb);
  CHECK(serialize_records(track::track(aw1, kb, "s.py").records) ==
        serialize_records(track::track(aw2, kb, "s.py").records));
}

TEST_CASE("multiple models each get their own record") {
  kb::KnowledgeBase kb = bundled();
  std::string source = testutil::read_file(std::string(testutil::corpus_dir()) + "/mini_06.py");
  TrackResult result = track_source(source, kb);
  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].model_var == "rf");
  CHECK(result.records[1].model_var == "logit");
  for (const auto &rec : result.records) {
    CHECK(rec.data_sources == std::vector<std::string>{"loans.csv"});
    REQUIRE(rec.feature_columns.excluded.size() == 1);
    CHECK(rec.feature_columns.excluded[0] == ColumnRef::name_ref("default"));
  }
}

TEST_CASE("records serialize and parse back") {
  kb::KnowledgeBase kb = bundled();
  TrackResult result =
      track_source(testutil::read_file(testutil::fixture("heart_disease.py")), kb);
  std::string json = serialize_records(result.records);
  auto parsed = parse_records(json);
  REQUIRE(parsed.size() == result.records.size());
  CHECK(parsed[0].model_var == result.records[0].model_var);
  CHECK(parsed[0].data_sources == result.records[0].data_sources);
  CHECK(parsed[0].feature_columns.included == result.records[0].feature_columns.included);
  CHECK(parsed[0].feature_columns.excluded == result.records[0].feature_columns.excluded);
}
