#include "doctest.h"
#include "jpq/engine.hpp"
#include "jpq/error.hpp"
#include "jpq/filter.hpp"
#include "jpq/syntax.hpp"

using namespace jpq;

namespace {

std::string run(const char* query, const char* doc) {
  DocRegistry docs;
  docs.add("d", parse_document(doc));
  return serialize(execute(plan_query(std::string_view(query)), docs));
}

}  // namespace

TEST_CASE("builtins") {
  CHECK(eval_builtin("count", {Arg::array(3)}) == Value(3));
  CHECK(eval_builtin("notnull", {Arg::scalar(Value(1))}) == Value(true));
  CHECK(eval_builtin("notnull", {Arg::absent()}) == Value(false));
  CHECK(eval_builtin("notnull", {Arg::scalar(Value())}) == Value(false));
  CHECK(eval_builtin("endWith", {Arg::scalar("a@x.edu"), Arg::scalar(".edu")}) == Value(true));
  CHECK(eval_builtin("startWith", {Arg::scalar("abc"), Arg::scalar("b")}) == Value(false));
  CHECK(eval_builtin("contains", {Arg::scalar("abc"), Arg::scalar("b")}) == Value(true));
  CHECK(eval_builtin("endWith", {Arg::absent(), Arg::scalar(".edu")}) == Value(false));
  CHECK_THROWS_AS(eval_builtin("count", {Arg::scalar(Value(1))}), Error);
  CHECK_THROWS_AS(eval_builtin("endWith", {Arg::scalar(Value(1)), Arg::scalar("x")}), Error);
  try {
    eval_builtin("nosuch", {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Query);
  }
}

TEST_CASE("comparisons") {
  CHECK(compare(CompareOp::Lt, Arg::scalar(1), Arg::scalar(2)));
  CHECK(compare(CompareOp::Lt, Arg::scalar("a"), Arg::scalar("b")));
  CHECK(compare(CompareOp::Eq, Arg::scalar(2), Arg::scalar(2.0)));
  CHECK(!compare(CompareOp::Eq, Arg::absent(), Arg::absent()));
  CHECK(!compare(CompareOp::Ne, Arg::scalar(Value()), Arg::scalar(1)));
  CHECK(compare(CompareOp::Ne, Arg::scalar(1), Arg::scalar("1")));
}

TEST_CASE("a scalar condition filters array elements") {
  CHECK(run(R"(from doc("d") [{"a":$x, "b":$y}] construct [$y] where $x > 1)",
            R"([{"a":1,"b":"p"},{"a":2,"b":"q"},{"a":3,"b":"r"}])") == R"(["q","r"])");
}

TEST_CASE("a failed root yields null") {
  CHECK(run(R"(from doc("d") {"a":$x} construct {"v":$x} where $x = 5)", R"({"a":1})") == "null");
}

TEST_CASE("filters prune nested arrays bottom up") {
  CHECK(run(R"(from doc("d") [{"n":$n, "m":[$m]}] construct [{"n":$n, "m":[$m]}] where $m > 1)",
            R"([{"n":"a","m":[1,2]},{"n":"b","m":[0]}])") == R"([{"n":"a","m":[2]}])");
}

TEST_CASE("quantifiers") {
  const char* doc = R"([{"n":"a","m":[1,2]},{"n":"b","m":[3,4]}])";
  CHECK(run(R"(from doc("d") [{"n":$n, "m":[$m]}] construct [$n] where (foreach $m; $m > 2))", doc) == R"(["b"])");
  CHECK(run(R"(from doc("d") [{"n":$n, "m":[$m]}] construct [$n] where (forsome $m; $m = 1))", doc) == R"(["a"])");
}

TEST_CASE("count over an array term") {
  CHECK(run(R"(from doc("d") [{"n":$n, "m":[$m]}] construct [$n] where count([$m]) >= 2)",
            R"([{"n":"a","m":[1]},{"n":"b","m":[3,4]}])") == R"(["b"])");
}

TEST_CASE("conditions mixing option branches need par") {
  QueryAst q = parse_query(R"(from doc("d") {"a":$x} | {"b":$y} construct $x | $y where $x = 1 or $y = 2)");
  try {
    validate_condition(*q.where, source_term(q));
    FAIL("expected invalid-composition");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Query);
    CHECK(std::string(e.what()).find("invalid-composition") != std::string::npos);
  }
  QueryAst ok = parse_query(R"(from doc("d") {"a":$x} | {"b":$y} construct $x | $y where $x = 1 par $y = 2)");
  CHECK_NOTHROW(validate_condition(*ok.where, source_term(ok)));
}

TEST_CASE("par and with cannot sit under boolean connectives") {
  QueryAst q = parse_query(R"(from doc("d") [{"a":$x, "b":$y}] construct [$x] where not ($x = 1 par $y = 2))");
  CHECK_THROWS_AS(validate_condition(*q.where, source_term(q)), Error);
}

TEST_CASE("options resolve to the first valid branch") {
  MatchResult r = MatchResult::option({MatchResult::failed(), MatchResult::binding("a", 1), MatchResult::binding("b", 2)},
                                      {{1}, {2}, {3}});
  MatchResult out = resolve_options(r);
  CHECK(out.selected == 1);
  MatchResult none = MatchResult::option({MatchResult::failed()}, {{1}});
  CHECK(!resolve_options(none).ok());
}

TEST_CASE("with applies its conditions in order") {
  const char* doc = R"([{"n":"a","m":[1,2,3]},{"n":"b","m":[1,5]}])";
  // Keep members above 1, then groups that still have two of them.
  CHECK(run(R"(from doc("d") [{"n":$n, "m":[$m]}] construct [{"n":$n, "m":[$m]}] where $m > 1 with count([$m]) >= 2)",
            doc) == R"([{"n":"a","m":[2,3]}])");
  CHECK(run(R"(from doc("d") [{"n":$n, "m":[$m]}] construct [{"n":$n, "m":[$m]}] where count([$m]) >= 2 with $m > 1)",
            doc) == R"([{"n":"a","m":[2,3]},{"n":"b","m":[5]}])");
}
