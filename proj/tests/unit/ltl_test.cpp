#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "req2ltl/errors.hpp"
#include "req2ltl/ltl.hpp"

using namespace req2ltl;
using ltl::Formula;
using ltl::Op;
using ltl::parse_ltl;
using ltl::print_ltl;

namespace {

Formula A(const char* s) { return Formula::atom(s); }

}  // namespace

TEST(LtlParse, TrafficLightRow) {
  EXPECT_EQ(parse_ltl("G (red -> X !green)"),
            Formula::globally(Formula::implies(A("red"), Formula::next(Formula::negation(A("green"))))));
}

TEST(LtlParse, SingleAtom) { EXPECT_EQ(parse_ltl("p"), A("p")); }

TEST(LtlParse, UntilIsLeftAssociative) {
  EXPECT_EQ(parse_ltl("a U b U c"), Formula::until(Formula::until(A("a"), A("b")), A("c")));
}

// Reference precedence table: each row is (input, fully parenthesized form).
TEST(LtlParse, PrecedenceTable) {
  const std::pair<const char*, const char*> rows[] = {
      {"a & b | c", "(a & b) | c"},
      {"a | b & c", "a | (b & c)"},
      {"a -> b -> c", "a -> (b -> c)"},
      {"a & b & c", "(a & b) & c"},
      {"a | b | c", "(a | b) | c"},
      {"a U b & c", "(a U b) & c"},
      {"a & b U c", "a & (b U c)"},
      {"!a U b", "(!a) U b"},
      {"X a U b", "(X a) U b"},
      {"G a -> F b", "(G a) -> (F b)"},
      {"a -> b | c & d", "a -> (b | (c & d))"},
      {"F G a", "F (G a)"},
      {"!!a", "!(!a)"},
      {"a | b -> c", "(a | b) -> c"},
  };
  for (const auto& [in, expected] : rows) {
    EXPECT_EQ(parse_ltl(in), parse_ltl(expected)) << in;
  }
}

TEST(LtlParse, AlternativeSpellings) {
  EXPECT_EQ(parse_ltl("G (a && b || !c)"), parse_ltl("G ((a & b) | !c)"));
  EXPECT_EQ(parse_ltl("G (a \xE2\x86\x92 \xC2\xAC b)"), parse_ltl("G (a -> !b)"));
  EXPECT_EQ(parse_ltl("a \xE2\x88\xA7 b \xE2\x88\xA8 c"), parse_ltl("a & b | c"));
}

TEST(LtlParse, RelationalAtoms) {
  auto f = parse_ltl("G (temperature>50 -> warning=ON)");
  EXPECT_EQ(f, Formula::globally(Formula::implies(A("temperature > 50"), A("warning = ON"))));
  EXPECT_EQ(parse_ltl("x != 2").text(), "x != 2");
  EXPECT_EQ(parse_ltl("INS.mode = valid").text(), "INS.mode = valid");
  EXPECT_EQ(parse_ltl("DevAngleLow <= -2.5").text(), "DevAngleLow <= -2.5");
}

TEST(LtlParse, ErrorsCarryOffsetAndHint) {
  try {
    parse_ltl("G (");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 3u);
    EXPECT_FALSE(e.expected().empty());
  }
  EXPECT_THROW(parse_ltl(""), SyntaxError);
  EXPECT_THROW(parse_ltl("a b"), SyntaxError);
  EXPECT_THROW(parse_ltl("(a"), SyntaxError);
  EXPECT_THROW(parse_ltl("a &"), SyntaxError);
  EXPECT_THROW(parse_ltl("G"), SyntaxError);
  EXPECT_THROW(parse_ltl("a = "), SyntaxError);
  EXPECT_THROW(parse_ltl("a ) b"), SyntaxError);
}

TEST(LtlParse, DeepNestingIsRejectedNotCrashed) {
  std::string deep(5000, '(');
  deep += "a";
  deep += std::string(5000, ')');
  EXPECT_THROW(parse_ltl(deep), SyntaxError);
}

TEST(LtlPrint, Examples) {
  EXPECT_EQ(print_ltl(Formula::globally(Formula::implies(A("red"), Formula::until(A("red"), A("yellow"))))),
            "G (red -> (red U yellow))");
  EXPECT_EQ(print_ltl(A("p")), "p");
  EXPECT_EQ(print_ltl(Formula::conjunction(Formula::eventually(A("green")),
                                           Formula::globally(Formula::negation(A("lm1"))))),
            "F green & G !lm1");
  EXPECT_EQ(print_ltl(parse_ltl("G (red -> X !green)")), "G (red -> X !green)");
  EXPECT_EQ(print_ltl(parse_ltl("(a -> b) -> c")), "(a -> b) -> c");
  EXPECT_EQ(print_ltl(parse_ltl("a -> b -> c")), "a -> b -> c");
  EXPECT_EQ(print_ltl(parse_ltl("a & (b & c)")), "a & (b & c)");
}

TEST(LtlPrint, RoundTripRandom) {
  std::mt19937_64 rng(20240611);
  const std::vector<std::string> atoms = {"p", "q", "r", "speed > 50", "INS.mode = valid"};
  for (int i = 0; i < 3000; ++i) {
    Formula f = fixtures::random_formula(rng, 8, atoms);
    const std::string text = print_ltl(f);
    ASSERT_EQ(parse_ltl(text), f) << text;
    ASSERT_EQ(print_ltl(parse_ltl(text)), text);
  }
}

TEST(LtlTokens, JoinToPrintedText) {
  auto f = parse_ltl("G (b -> X ((c U a) | G c))");
  std::string joined;
  for (const auto& t : ltl::print_tokens(f)) joined += t.text;
  std::string printed = print_ltl(f);
  printed.erase(std::remove(printed.begin(), printed.end(), ' '), printed.end());
  EXPECT_EQ(joined, printed);
}

TEST(LtlAps, Collect) {
  EXPECT_EQ(ltl::collect_aps(parse_ltl("G (red -> X !green)")), (std::set<std::string>{"red", "green"}));
  EXPECT_EQ(ltl::collect_aps(A("p")), (std::set<std::string>{"p"}));
  EXPECT_EQ(ltl::collect_aps(parse_ltl("F g & G !g")), (std::set<std::string>{"g"}));
}

TEST(LtlAps, Substitute) {
  auto lifted = parse_ltl("G (Prop1 -> X !Prop2)");
  EXPECT_EQ(ltl::substitute_placeholders(lifted, {{"Prop1", "red"}, {"Prop2", "green"}}),
            parse_ltl("G (red -> X !green)"));
  auto plain = parse_ltl("a U b");
  EXPECT_EQ(ltl::substitute_placeholders(plain, {}), plain);
  try {
    ltl::substitute_placeholders(parse_ltl("F Prop1"), {{"Prop2", "x"}});
    FAIL() << "expected MissingPlaceholder";
  } catch (const MissingPlaceholder& e) {
    EXPECT_EQ(e.name(), "Prop1");
  }
}

TEST(LtlAps, SubstitutionMapsApSet) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> lifted = {"Prop1", "Prop2", "Prop3"};
  const std::map<std::string, std::string> m = {{"Prop1", "door_open"}, {"Prop2", "speed > 3"}, {"Prop3", "alarm"}};
  for (int i = 0; i < 500; ++i) {
    auto f = fixtures::random_formula(rng, 6, lifted);
    std::set<std::string> image;
    for (const auto& a : ltl::collect_aps(f)) image.insert(m.at(a));
    EXPECT_EQ(ltl::collect_aps(ltl::substitute_placeholders(f, m)), image);
  }
}

TEST(LtlFormula, AtomRejectsBlank) {
  EXPECT_THROW(Formula::atom("   "), std::invalid_argument);
  EXPECT_EQ(Formula::atom("  p ").text(), "p");
}

TEST(LtlFormula, SizeAndDepth) {
  auto f = parse_ltl("G (a -> X b)");
  EXPECT_EQ(f.size(), 5u);
  EXPECT_EQ(f.depth(), 4u);
}
