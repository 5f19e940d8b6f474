#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "req2ltl/errors.hpp"
#include "req2ltl/lasso.hpp"
#include "req2ltl/translator.hpp"
#include "req2ltl/validator.hpp"

using namespace req2ltl;
using namespace req2ltl::ir;
using ltl::parse_ltl;
using ltl::print_ltl;
using synth::translate;

TEST(Translate, PatternGolden) {
  for (const auto& c : fixtures::pattern_pairs()) {
    EXPECT_EQ(translate(c.tree), parse_ltl(c.ltl)) << c.id << ": " << print_ltl(translate(c.tree));
  }
}

TEST(Translate, WarningLight) {
  auto c = fixtures::warning_light();
  EXPECT_EQ(print_ltl(translate(c.tree)), c.ltl);
}

TEST(Translate, FigureOneGroundTruths) {
  for (const auto& c : {fixtures::navigation_output(), fixtures::dual_inertial()}) {
    EXPECT_EQ(translate(c.tree), parse_ltl(c.ltl)) << c.id;
  }
}

TEST(Translate, WaypointRepair) {
  auto c = fixtures::waypoint_heading();
  EXPECT_EQ(translate(c.tree), parse_ltl(c.ltl));
  auto fixed = edit_node(c.tree, fixtures::waypoint_first_subgoal(), ScopeOp::Next);
  EXPECT_EQ(translate(fixed), parse_ltl(fixtures::waypoint_heading_corrected()));
}

TEST(Translate, BasicPrecedence) {
  auto t = OnionNode::relation(RelationOp::BasicPrecedence, fixtures::leaf("landmark1"), fixtures::leaf("red"));
  EXPECT_EQ(print_ltl(translate(t)), "F (landmark1 & F red)");
}

TEST(Translate, Atomic) {
  EXPECT_EQ(synth::translate_atomic(fixtures::ap("red")).text(), "red");
  EXPECT_EQ(synth::translate_atomic(fixtures::ap("temperature", RelOp::Gt, "50")).text(), "temperature > 50");
  AtomicProposition a = fixtures::ap("mode", RelOp::Eq, "valid");
  a.com = "INS";
  auto f = synth::translate_atomic(a);
  EXPECT_EQ(f.text(), "INS.mode = valid");
  EXPECT_EQ(parse_ltl(print_ltl(f)), f);
  EXPECT_EQ(synth::translate_atomic(fixtures::ap("limit", RelOp::Le, "max_speed*2")).text(),
            "limit <= max_speed * 2");
}

TEST(Translate, RejectsInvalidTrees) {
  auto bad = OnionNode::raw(NodeKind::Relation, RelationOp::And, std::nullopt, {fixtures::leaf("a")});
  EXPECT_THROW(translate(bad), NotValidated);
  EXPECT_THROW(translate(OnionNode::mode(fixtures::ap("m"), fixtures::leaf("p"))), NotValidated);
}

TEST(Translate, NoSilentGlobally) {
  EXPECT_EQ(print_ltl(translate(fixtures::leaf("p"))), "p");
}

namespace {

std::size_t count_nodes(const OnionNode& n) {
  std::size_t total = 1;
  for (const auto& c : n.children()) total += count_nodes(*c);
  return total;
}

std::size_t expected_formula_size(const OnionNode& n) {
  // BasicPrecedence expands to F (l & F r): three operator nodes for one.
  std::size_t own = n.relation_op() == RelationOp::BasicPrecedence ? 3 : 1;
  if (n.kind() == NodeKind::Mode) own = 2;  // implication plus the condition atom
  for (const auto& c : n.children()) own += expected_formula_size(*c);
  return own;
}

}  // namespace

TEST(Translate, RandomTreeProperties) {
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    auto t = random_tree(seed, 7);
    auto f = translate(t);
    ASSERT_EQ(parse_ltl(print_ltl(f)), f);
    ASSERT_EQ(translate(t), f);
    ASSERT_EQ(f.size(), expected_formula_size(*t)) << count_nodes(*t);
  }
}

TEST(Translate, CanonicalizationPreservesMeaning) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto t = random_tree(seed, 6);
    auto c = validation::canonicalize(t);
    ASSERT_TRUE(ltl::bounded_equiv(translate(t), translate(c))) << seed;
  }
  auto mixed = OnionNode::relation(RelationOp::Or, fixtures::leaf("a"),
                                   OnionNode::relation(RelationOp::And, fixtures::leaf("b"), fixtures::leaf("c")));
  EXPECT_TRUE(ltl::bounded_equiv(translate(mixed), translate(validation::canonicalize(mixed))));
}
