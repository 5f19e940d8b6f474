#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "mutations.hpp"
#include "req2ltl/onion_json.hpp"
#include "req2ltl/validator.hpp"

using namespace req2ltl;
using namespace req2ltl::ir;
using validation::DiagnosticKind;
using validation::Severity;
using validation::validate;

namespace {

OnionPtr And(OnionPtr l, OnionPtr r) { return OnionNode::relation(RelationOp::And, std::move(l), std::move(r)); }
OnionPtr Or(OnionPtr l, OnionPtr r) { return OnionNode::relation(RelationOp::Or, std::move(l), std::move(r)); }
OnionPtr G(OnionPtr c) { return OnionNode::scope(ScopeOp::Globally, std::move(c)); }
OnionPtr Not(OnionPtr c) { return OnionNode::scope(ScopeOp::Not, std::move(c)); }
OnionPtr L(const char* v) { return fixtures::leaf(v); }

bool has(const validation::ValidationReport& r, DiagnosticKind k, Severity s, const NodePath& p) {
  return std::any_of(r.diagnostics.begin(), r.diagnostics.end(),
                     [&](const auto& d) { return d.kind == k && d.severity == s && d.path == p; });
}

}  // namespace

TEST(Validate, WarningLightIsClean) {
  auto t = fixtures::warning_light().tree;
  auto r = validate(t);
  EXPECT_TRUE(r.diagnostics.empty());
  ASSERT_TRUE(r.canonical_tree);
  EXPECT_TRUE(equal(r.canonical_tree, t));
}

TEST(Validate, OneChildRelation) {
  auto broken = OnionNode::raw(NodeKind::Relation, RelationOp::And, std::nullopt, {L("a")});
  auto t = G(broken);
  auto r = validate(t);
  EXPECT_TRUE(has(r, DiagnosticKind::ArityViolation, Severity::Error, NodePath{{PathStep::Child}}));
  EXPECT_FALSE(r.canonical_tree);
}

TEST(Validate, RightLeaningAndChain) {
  auto r = validate(And(L("a"), And(L("b"), L("c"))));
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].kind, DiagnosticKind::RedundantChain);
  EXPECT_EQ(r.diagnostics[0].severity, Severity::Warning);
  EXPECT_TRUE(r.diagnostics[0].path.empty());
  EXPECT_TRUE(equal(r.canonical_tree, And(And(L("a"), L("b")), L("c"))));
}

TEST(Validate, LeafWithChildren) {
  auto bad = OnionNode::raw(NodeKind::Atomic, std::monostate{}, fixtures::ap("p"), {L("q")});
  auto r = validate(G(bad));
  EXPECT_TRUE(has(r, DiagnosticKind::LeafMisplacement, Severity::Error, NodePath{{PathStep::Child}}));
}

TEST(Validate, ModePlacement) {
  auto mode = OnionNode::mode(fixtures::ap("valid"), L("p"));
  EXPECT_FALSE(validate(G(mode)).has_errors());
  auto r1 = validate(mode);
  EXPECT_TRUE(has(r1, DiagnosticKind::IllegalModePlacement, Severity::Error, NodePath{}));
  auto r2 = validate(OnionNode::scope(ScopeOp::Eventually, mode));
  EXPECT_TRUE(has(r2, DiagnosticKind::IllegalModePlacement, Severity::Error, NodePath{{PathStep::Child}}));
  auto r3 = validate(G(G(mode)));
  EXPECT_TRUE(has(r3, DiagnosticKind::IllegalModePlacement, Severity::Error,
                  NodePath{{PathStep::Child, PathStep::Child}}));
  auto r4 = validate(G(And(mode, L("q"))));
  EXPECT_TRUE(r4.has_errors());
}

TEST(Validate, SubfieldRules) {
  AtomicProposition no_formula = fixtures::ap("speed");
  no_formula.rel = RelOp::Gt;
  EXPECT_TRUE(has(validate(OnionNode::atomic(no_formula)), DiagnosticKind::MissingSubfield, Severity::Error, {}));

  AtomicProposition stray_formula = fixtures::ap("speed");
  stray_formula.formula = "3";
  EXPECT_TRUE(
      has(validate(OnionNode::atomic(stray_formula)), DiagnosticKind::ContradictorySubfields, Severity::Error, {}));

  auto symbolic = validate(fixtures::leaf("speed", RelOp::Gt, "LIMIT"));
  EXPECT_TRUE(has(symbolic, DiagnosticKind::ContradictorySubfields, Severity::Warning, {}));
  EXPECT_FALSE(symbolic.has_errors());

  EXPECT_TRUE(validate(fixtures::leaf("speed", RelOp::Eq, "LIMIT")).diagnostics.empty());
  EXPECT_TRUE(validate(fixtures::leaf("DevAngleLow", RelOp::Lt, "-2.5")).diagnostics.empty());

  EXPECT_TRUE(has(validate(L("")), DiagnosticKind::MissingSubfield, Severity::Error, {}));
  EXPECT_TRUE(has(validate(L("landmark 1")), DiagnosticKind::MissingSubfield, Severity::Error, {}));
  EXPECT_TRUE(validate(fixtures::leaf("x", RelOp::Eq, "((")).has_errors());

  auto missing_cond = OnionNode::raw(NodeKind::Mode, std::monostate{}, std::nullopt, {L("p")});
  EXPECT_TRUE(has(validate(G(missing_cond)), DiagnosticKind::MissingSubfield, Severity::Error,
                  NodePath{{PathStep::Child}}));

  AtomicProposition bad_cond = fixtures::ap("mode");
  bad_cond.rel = RelOp::Eq;
  auto r = validate(G(OnionNode::mode(bad_cond, L("p"))));
  EXPECT_TRUE(has(r, DiagnosticKind::MissingSubfield, Severity::Error,
                  NodePath{{PathStep::Child, PathStep::Condition}}));
}

TEST(Validate, UnknownOperator) {
  auto t = OnionNode::raw(NodeKind::Scope, UnknownOp{"Sometimes"}, std::nullopt, {L("p")});
  EXPECT_TRUE(has(validate(t), DiagnosticKind::UnknownOperator, Severity::Error, {}));
  auto wrong_family = OnionNode::raw(NodeKind::Scope, RelationOp::And, std::nullopt, {L("p")});
  EXPECT_TRUE(has(validate(wrong_family), DiagnosticKind::UnknownOperator, Severity::Error, {}));
}

TEST(Validate, DuplicateScopesAreRedundant) {
  auto r = validate(G(G(G(L("p")))));
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].kind, DiagnosticKind::RedundantChain);
  EXPECT_TRUE(equal(r.canonical_tree, G(L("p"))));
  auto n = validate(Not(Not(L("p"))));
  EXPECT_TRUE(equal(n.canonical_tree, L("p")));
  EXPECT_TRUE(equal(validation::canonicalize(Not(Not(Not(L("p"))))), Not(L("p"))));
}

TEST(Validate, TableShapesAreClean) {
  for (const auto& c : fixtures::pattern_pairs()) {
    auto r = validate(c.tree);
    EXPECT_TRUE(r.diagnostics.empty()) << c.id;
  }
  for (const auto& c : {fixtures::navigation_output(), fixtures::dual_inertial(), fixtures::waypoint_heading()}) {
    EXPECT_TRUE(validate(c.tree).diagnostics.empty()) << c.id;
  }
}

TEST(Canonicalize, Examples) {
  EXPECT_TRUE(equal(validation::canonicalize(And(L("a"), And(L("b"), And(L("c"), L("d"))))),
                    And(And(And(L("a"), L("b")), L("c")), L("d"))));
  auto left = And(And(L("a"), L("b")), L("c"));
  EXPECT_TRUE(equal(validation::canonicalize(left), left));
  auto mixed = Or(L("a"), And(L("b"), L("c")));
  EXPECT_TRUE(equal(validation::canonicalize(mixed), mixed));
}

TEST(Canonicalize, NegationCollapseJoinsRuns) {
  auto t = And(L("a"), Not(Not(And(L("b"), L("c")))));
  auto once = validation::canonicalize(t);
  EXPECT_TRUE(equal(once, And(And(L("a"), L("b")), L("c"))));
  EXPECT_TRUE(equal(validation::canonicalize(once), once));
}

TEST(Canonicalize, IdempotentAndRevalidatesClean) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    auto t = random_tree(seed, 7);
    auto r = validate(t);
    ASSERT_TRUE(r.canonical_tree);
    ASSERT_TRUE(equal(validation::canonicalize(r.canonical_tree), r.canonical_tree));
    auto again = validate(r.canonical_tree);
    ASSERT_FALSE(again.has_errors());
    for (const auto& d : again.diagnostics) ASSERT_NE(d.kind, DiagnosticKind::RedundantChain);
  }
}

TEST(Validate, ReportPathsResolveAndInputUntouched) {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto t = random_tree(seed, 6);
    for (auto m : fixtures::all_mutations()) {
      auto mut = fixtures::mutate(t, m, rng);
      if (!mut) continue;
      auto mutated = mut->tree;
      const std::string before = serialize_onion(mutated);
      auto r = validate(mutated);
      EXPECT_EQ(serialize_onion(mutated), before);
      for (const auto& d : r.diagnostics) {
        ASSERT_TRUE(resolves(*mutated, d.path)) << to_string(d.path);
        ASSERT_FALSE(d.message.empty());
      }
    }
  }
}

TEST(Validate, MutationsAreCaught) {
  std::mt19937_64 rng(42);
  for (auto m : fixtures::all_mutations()) {
    int applied = 0;
    for (std::uint64_t seed = 0; applied < 200; ++seed) {
      auto t = random_tree(seed, 6);
      ASSERT_FALSE(validate(t).has_errors());
      auto mut = fixtures::mutate(t, m, rng);
      if (!mut) continue;
      ++applied;
      const auto& [mutated, region] = *mut;
      auto r = validate(mutated);
      const bool caught = std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const auto& d) {
        return d.severity == Severity::Error && fixtures::addresses_region(d.path, region) &&
               resolves(*mutated, d.path);
      });
      ASSERT_TRUE(caught) << fixtures::to_string(m) << " seed " << seed << " at " << to_string(region);
    }
  }
}

TEST(Diagnostics, JsonLines) {
  auto r = validate(And(L("a"), And(L("b"), L("c"))));
  const std::string line = validation::to_json_line(r.diagnostics[0]);
  auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["severity"], "Warning");
  EXPECT_EQ(j["kind"], "RedundantChain");
  EXPECT_TRUE(j["path"].is_array());
  EXPECT_TRUE(j["suggestedFix"].is_string());
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(validation::to_json_lines(r.diagnostics), line + "\n");
}
