#include "doctest.h"
#include "jpq/constructor.hpp"
#include "jpq/engine.hpp"
#include "jpq/error.hpp"
#include "jpq/syntax.hpp"

using namespace jpq;

namespace {

std::string run(const char* query, const char* doc) {
  DocRegistry docs;
  docs.add("d", parse_document(doc));
  return serialize(execute(plan_query(std::string_view(query)), docs));
}

const char* kPeople = R"([{"n":"b","g":2,"k":"x"},{"n":"a","g":1,"k":"y"},{"n":"c","g":2,"k":"x"}])";

}  // namespace

TEST_CASE("backbones") {
  auto bb = [](const char* text) { return to_string(backbone(parse_construction(text))); };
  CHECK(bb(R"({"a":$x, "b":"c"})") == "$x");
  CHECK(bb(R"([{"a":$x, "b":$y}])") == "[($x, $y)]_?");
  CHECK(bb(R"([$x] groupby $y%)") == "[$x]_{$y%}");
  CHECK(bb(R"($x | ^[$y])") == "$x | ^[$y]_?");
  CHECK(bb(R"(count([$x]))") == "[$x]_?");
}

TEST_CASE("constants and renaming") {
  CHECK(run(R"(from doc("d") [{"n":$n}] construct {"names":[{"name":$n, "kind":"person"}]})", kPeople) ==
        R"({"names":[{"name":"b","kind":"person"},{"name":"a","kind":"person"},{"name":"c","kind":"person"}]})");
}

TEST_CASE("ordering") {
  CHECK(run(R"(from doc("d") [{"n":$n}] construct [$n] asc)", kPeople) == R"(["a","b","c"])");
  CHECK(run(R"(from doc("d") [{"n":$n}] construct [$n] desc)", kPeople) == R"(["c","b","a"])");
  CHECK(run(R"(from doc("d") [{"n":$n, "g":$g}] construct [$n] orderby $g desc)", kPeople) == R"(["b","c","a"])");
}

TEST_CASE("grouping") {
  CHECK(run(R"(from doc("d") [{"n":$n, "k":$k}] construct [{"key":$k%, "names":[$n]}] groupby $k%)", kPeople) ==
        R"([{"key":"x","names":["b","c"]},{"key":"y","names":["a"]}])");
}

TEST_CASE("calls in construction") {
  CHECK(run(R"(from doc("d") [{"n":$n}] construct {"total":count([$n])})", kPeople) == R"({"total":3})");
}

TEST_CASE("duplicate output keys are rejected at run time") {
  CHECK_THROWS_AS(run(R"(from doc("d") [{"n":$n, "k":$k}] construct {"a":$n, "a":$k})", kPeople), Error);
}

TEST_CASE("mixed sort keys are type errors") {
  try {
    run(R"(from doc("d") [$x] construct [$x] asc)", R"([1,"a"])");
    FAIL("expected a type error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Type);
  }
}

TEST_CASE("constructions the extraction cannot support") {
  CHECK_THROWS_AS(plan_query(std::string_view(R"(from doc("d") [$x] construct {"v":$x})")), Error);
}

TEST_CASE("options build from the branch in effect") {
  CHECK(run(R"(from doc("d") [{"a":$x} | {"b":$y}] construct [{"A":$x} | {"B":$y}])", R"([{"a":1},{"b":2},{"c":3}])") ==
        R"([{"A":1},{"B":2}])");
}
