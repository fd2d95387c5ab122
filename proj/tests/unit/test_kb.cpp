#include <doctest.h>

#include "helpers.hpp"
#include "mlprov/kb.hpp"

using namespace mlprov;
using namespace mlprov::kb;

namespace {

KnowledgeBase bundled() { return load_kb(testutil::kb_path()); }

} // namespace

TEST_CASE("bundled kb loads and answers the catboost queries") {
  KnowledgeBase kb = bundled();

  SUBCASE("fit called on a model") {
    const KbFact *fact = query_api(kb, "catboost", std::nullopt, {Role::Model}, "fit");
    REQUIRE(fact != nullptr);
    REQUIRE(fact->output_roles.size() == 1);
    CHECK(fact->output_roles[0] == Role::TrainedModel);
    REQUIRE(fact->input_roles.size() == 3);
    CHECK(fact->input_roles[0].second == Role::Features);
    CHECK(fact->input_roles[1].second == Role::Labels);
    CHECK(fact->input_roles[2].first.keyword == "eval_set");
    CHECK(fact->input_roles[2].second == Role::ValidationSet);
  }
  SUBCASE("constructor with no caller") {
    const KbFact *fact = query_api(kb, "catboost", std::nullopt, {}, "CatBoostClassifier");
    REQUIRE(fact != nullptr);
    CHECK(fact->output_roles[0] == Role::Model);
  }
  SUBCASE("fit without a model caller does not match") {
    CHECK(query_api(kb, "catboost", std::nullopt, {}, "fit") == nullptr);
  }
  SUBCASE("absent api") {
    CHECK(query_api(kb, "numpy", std::nullopt, {}, "zeros") == nullptr);
  }
  SUBCASE("train_test_split carries the split roles") {
    const KbFact *fact =
        query_api(kb, "sklearn", std::optional<std::string>("model_selection"), {},
                  "train_test_split");
    REQUIRE(fact != nullptr);
    REQUIRE(fact->output_roles.size() == 4);
    CHECK(fact->output_roles[0] == Role::Features);
    CHECK(fact->output_roles[2] == Role::Labels);
  }
}

TEST_CASE("empty kb document is valid and answers nothing") {
  KnowledgeBase kb = parse_kb("{}");
  CHECK(kb.api_facts.empty());
  CHECK(kb.tracker_facts.empty());
  CHECK(query_api(kb, "pandas", std::nullopt, {}, "read_csv") == nullptr);
}

TEST_CASE("unknown role names fail with a pointer to the entry") {
  std::string text = R"({"api_facts": [
    {"library": "pandas", "api_name": "read_csv",
     "input_roles": [["1", "featurez"]], "output_roles": []}]})";
  try {
    parse_kb(text);
    FAIL("expected KbFormatError");
  } catch (const KbFormatError &e) {
    CHECK(std::string(e.pointer()).find("/api_facts/0/input_roles/0") == 0);
  }
}

TEST_CASE("duplicate facts are rejected at load") {
  std::string text = R"({"api_facts": [
    {"library": "catboost", "caller": "model", "api_name": "fit",
     "input_roles": [["1", "features"]], "output_roles": ["trained_model"]},
    {"library": "catboost", "caller": "model", "api_name": "fit",
     "input_roles": [["1", "features"]], "output_roles": ["trained_model"]}]})";
  CHECK_THROWS_AS(parse_kb(text), KbFormatError);
}

TEST_CASE("specificity prefers facts with a caller matcher") {
  std::string text = R"({"api_facts": [
    {"library": "lib", "api_name": "fit",
     "input_roles": [["1", "features"]], "output_roles": ["features"]},
    {"library": "lib", "caller": "model", "api_name": "fit",
     "input_roles": [["1", "features"]], "output_roles": ["trained_model"]}]})";
  KnowledgeBase kb = parse_kb(text);
  const KbFact *with_model = query_api(kb, "lib", std::nullopt, {Role::Model}, "fit");
  REQUIRE(with_model != nullptr);
  CHECK(with_model->output_roles[0] == Role::TrainedModel);
  const KbFact *without = query_api(kb, "lib", std::nullopt, {}, "fit");
  REQUIRE(without != nullptr);
  CHECK(without->output_roles[0] == Role::Features);
}

TEST_CASE("backward queries bind input roles from output roles") {
  KnowledgeBase kb = bundled();

  SUBCASE("train_test_split back-propagates the first positions") {
    std::vector<std::set<Role>> observed = {{Role::Features}, {}, {}, {}};
    auto bindings = query_backward(kb, observed, "train_test_split");
    REQUIRE(bindings.has_value());
    bool pos1_features = false, pos2_labels = false;
    for (const auto &b : *bindings) {
      if (b.slot.kind == Slot::Kind::Position && b.slot.position == 1 && b.role == Role::Features)
        pos1_features = true;
      if (b.slot.kind == Slot::Kind::Position && b.slot.position == 2 && b.role == Role::Labels)
        pos2_labels = true;
    }
    CHECK(pos1_features);
    CHECK(pos2_labels);
  }
  SUBCASE("drop propagates to its caller") {
    auto bindings = query_backward(kb, {{Role::Features}}, "drop");
    REQUIRE(bindings.has_value());
    REQUIRE(bindings->size() == 1);
    CHECK((*bindings)[0].slot.kind == Slot::Kind::Caller);
    CHECK((*bindings)[0].role == Role::Features);
  }
  SUBCASE("no fact emits metric from fit") {
    CHECK(!query_backward(kb, {{Role::Metric}}, "fit").has_value());
  }
  SUBCASE("labels do not flow backward through a column subscript") {
    CHECK(!query_backward(kb, {{Role::Labels}}, "Subscript").has_value());
  }
}

TEST_CASE("tracker queries honor the condition") {
  KnowledgeBase kb = bundled();

  SUBCASE("drop with axis=1") {
    KeywordView kwargs{{"axis", Literal{std::int64_t{1}}}};
    const TrackerFact *fact = query_tracker(kb, "drop", kwargs);
    REQUIRE(fact != nullptr);
    CHECK(fact->column_exclusion);
  }
  SUBCASE("drop with axis=0 is row-wise and ignored") {
    KeywordView kwargs{{"axis", Literal{std::int64_t{0}}}};
    CHECK(query_tracker(kb, "drop", kwargs) == nullptr);
  }
  SUBCASE("drop with no keywords is ignored") {
    CHECK(query_tracker(kb, "drop", {}) == nullptr);
  }
  SUBCASE("drop with a columns keyword matches regardless of value") {
    KeywordView kwargs{{"columns", std::nullopt}};
    const TrackerFact *fact = query_tracker(kb, "drop", kwargs);
    REQUIRE(fact != nullptr);
    CHECK(fact->column_exclusion);
  }
  SUBCASE("subscript rule follows the input then interprets the slice") {
    const TrackerFact *fact = query_tracker(kb, "Subscript", {});
    REQUIRE(fact != nullptr);
    CHECK(!fact->column_exclusion);
    REQUIRE(fact->traversal_rule.size() == 2);
    CHECK(fact->traversal_rule[0].kind == TraversalStep::Kind::FollowInput);
    CHECK(fact->traversal_rule[0].position == 1);
    CHECK(fact->traversal_rule[1].kind == TraversalStep::Kind::InterpretSlice);
  }
  SUBCASE("read_csv is not a column-selection op") {
    CHECK(query_tracker(kb, "read_csv", {}) == nullptr);
  }
}

TEST_CASE("validate_kb reports structural issues") {
  SUBCASE("bundled kb is clean") { CHECK(validate_kb(bundled()).empty()); }

  SUBCASE("duplicate facts built in memory") {
    KnowledgeBase kb;
    KbFact f;
    f.library = "catboost";
    f.caller = Role::Model;
    f.api_name = "fit";
    f.output_roles = {Role::TrainedModel};
    kb.api_facts.push_back(f);
    kb.api_facts.push_back(f);
    auto diags = validate_kb(kb);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "duplicate_fact");
  }
  SUBCASE("traversal step after a terminal step") {
    KnowledgeBase kb;
    TrackerFact f;
    f.op_matcher = "drop";
    f.traversal_rule = {{TraversalStep::Kind::CollectConstants, 1},
                        {TraversalStep::Kind::FollowInput, 1}};
    kb.tracker_facts.push_back(f);
    auto diags = validate_kb(kb);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "rule_order");
  }
  SUBCASE("module without a library") {
    KnowledgeBase kb;
    KbFact f;
    f.module = "model_selection";
    f.api_name = "x";
    kb.api_facts.push_back(f);
    auto diags = validate_kb(kb);
    REQUIRE(!diags.empty());
    CHECK(diags[0].code == "unreachable_fact");
  }
}

TEST_CASE("serialization round-trips the bundled kb") {
  KnowledgeBase kb = bundled();
  KnowledgeBase again = parse_kb(serialize_kb(kb));
  CHECK(kb == again);
}

TEST_CASE("slot grammar") {
  CHECK(Slot::parse("1")->kind == Slot::Kind::Position);
  CHECK(Slot::parse("7")->position == 7);
  CHECK(Slot::parse("caller")->kind == Slot::Kind::Caller);
  CHECK(Slot::parse("*")->kind == Slot::Kind::Variadic);
  CHECK(Slot::parse("eval_set")->kind == Slot::Kind::Keyword);
  CHECK(!Slot::parse("0").has_value());
  CHECK(!Slot::parse("").has_value());
}
