#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "jpq/error.hpp"
#include "jpq/syntax.hpp"

using namespace jpq;

TEST_CASE("string predicates") {
  StringPredicate p{"?president?"};
  CHECK(p.matches("president"));
  CHECK(p.matches("vice-presidents"));
  CHECK(!p.matches("dean"));
  CHECK(StringPredicate{"a?c"}.matches("ac"));
  CHECK(!StringPredicate{"abc"}.matches("abcd"));
  CHECK(StringPredicate{"?"}.matches(""));
}

TEST_CASE("matching terms of patterns") {
  auto mt = [](const char* text) { return to_string(derive_matching_term(parse_pattern(text))); };
  CHECK(mt("$x") == "$x");
  CHECK(mt("{\"a\":$x, \"b\":$y}") == "($x, $y)");
  CHECK(mt("[$x]") == "[$x]");
  CHECK(mt("$x | [$y]") == "$x | [$y]");
  CHECK(mt("/$k:$v") == "[($k, $v)]");
  CHECK(mt("//$x") == "[$x]");
  CHECK(mt("{\"a\":(1 | 2)}") == "()");
  CHECK(mt("<$a, {\"x\":$b}>") == "($a, $b)");
}

TEST_CASE("the president pattern") {
  Term t = derive_matching_term(parse_pattern(
      R"(</$r"?president?":(<$p1,{"ID":$id1}>|[<$p2,{"ID":$id2}>]), {"schools":[{"name":$n, "faculty":[{"ID":$id3}]}]}>)"));
  CHECK(to_string(t) == "([($r, ($p1, $id1) | [($p2, $id2)])], [($n, [$id3])])");
}

TEST_CASE("query structure") {
  QueryAst q = parse_query(R"(from doc("a") {"x":$x}, doc("b") [$y]
    construct {"r":[{"x":$x, "y":$y}]} where $x = 1 par count([$y]) > 2)");
  REQUIRE(q.sources.size() == 2);
  CHECK(q.sources[1].doc == "b");
  REQUIRE(q.where.has_value());
  CHECK(q.where->kind == Condition::Kind::Par);
  CHECK(to_string(source_term(q)) == "($x, [$y])");
}

TEST_CASE("comments are skipped") {
  QueryAst q = parse_query("# header\nfrom doc(\"a\") $x # tail\nconstruct $x");
  CHECK(q.construct.kind == ConstructionPattern::Kind::Variable);
}

TEST_CASE("scoping errors") {
  CHECK_THROWS_AS(parse_query(R"(from doc("a") {"x":$x, "y":$x} construct $x)"), Error);
  CHECK_THROWS_AS(parse_query(R"(from doc("a") $x construct $y)"), Error);
  CHECK_THROWS_AS(parse_query(R"(from doc("a") $x construct $x where $z = 1)"), Error);
}

TEST_CASE("syntax errors carry positions") {
  try {
    parse_query("from doc(\"a\") {\"x\" $x}\nconstruct $x");
    FAIL("expected an error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() > 1);
  }
  CHECK_THROWS_AS(parse_query("construct 1"), SyntaxError);
  CHECK_THROWS_AS(parse_pattern("{\"a\":}"), SyntaxError);
}

TEST_CASE("random queries survive unparse and parse") {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    QueryAst q = gen::query(rng);
    std::string text = unparse(q);
    INFO(text);
    QueryAst back;
    REQUIRE_NOTHROW(back = parse_query(text));
    CHECK(back == q);
    CHECK(unparse(back) == text);
  }
}
