#include <gtest/gtest.h>

#include "retrace/literal.hpp"
#include "retrace/sexpr.hpp"

using namespace retrace;

TEST(SExpr, ReadsNestedListsAndQuotedAtoms) {
  auto forms = read_sexprs("(a \"b c\" (d)) ; comment\n(e)");
  ASSERT_EQ(forms.size(), 2u);
  ASSERT_EQ(forms[0].items.size(), 3u);
  EXPECT_TRUE(forms[0].items[1].quoted);
  EXPECT_EQ(forms[0].items[1].atom, "b c");
  EXPECT_TRUE(forms[0].items[2].has_head("d"));
  EXPECT_EQ(forms[1].loc.line, 2);
}

TEST(SExpr, ReportsPositionOfUnbalancedParen) {
  try {
    read_sexprs("(a\n  (b)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.loc().line, 1);
  }
  EXPECT_THROW(read_sexprs("a)"), ParseError);
  EXPECT_THROW(read_sexprs("\"abc"), ParseError);
}

TEST(SExpr, PrintQuotesWhenNeeded) {
  auto e = read_sexprs("(at \"mail room\" x)").front();
  EXPECT_EQ(to_string(e), "(at \"mail room\" x)");
}

TEST(Literal, ParseAndPrint) {
  auto g = parse_ground_literal("not at(mail room)");
  EXPECT_FALSE(g.positive);
  EXPECT_EQ(g.literal.predicate, "at");
  EXPECT_EQ(g.literal.args, std::vector<std::string>{"mail room"});
  EXPECT_EQ(to_string(g), "not at(mail room)");
  EXPECT_EQ(to_string(parse_ground_literal("in-elevator()")), "in-elevator()");
  EXPECT_THROW(parse_ground_literal("at(x"), std::invalid_argument);
}
