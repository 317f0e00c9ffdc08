#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "jpq/error.hpp"
#include "jpq/value.hpp"

using namespace jpq;

TEST_CASE("parse and serialize basics") {
  Value v = parse_document(R"({"a": [1, 2.5, true, null, "xé"], "b": {}})");
  REQUIRE(v.is_object());
  CHECK(v.as_object().size() == 2);
  CHECK(v.as_object()[0].first == "a");
  CHECK(v.as_object()[0].second.as_array()[1].as_number() == 2.5);
  CHECK(v.as_object()[0].second.as_array()[3].is_empty());
  CHECK(v.as_object()[0].second.as_array()[4].as_string() == "x\xC3\xA9");
  CHECK(serialize(v) == R"({"a":[1,2.5,true,null,"xé"],"b":{}})");
}

TEST_CASE("member order follows the document") {
  Value v = parse_document(R"({"z":1,"a":2,"m":3})");
  CHECK(serialize(v) == R"({"z":1,"a":2,"m":3})");
}

TEST_CASE("duplicate keys are data errors naming the key") {
  try {
    parse_document(R"({"a":{"k":1,"k":2}})");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
    CHECK(std::string(e.what()).find("k") != std::string::npos);
  }
}

TEST_CASE("malformed input reports line and column") {
  try {
    parse_document("{\n  \"a\": tru\n}");
    FAIL("expected an error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_document("[1,]"), SyntaxError);
  CHECK_THROWS_AS(parse_document("\"abc"), SyntaxError);
  CHECK_THROWS_AS(parse_document("1 2"), SyntaxError);
}

TEST_CASE("surrogate pairs decode") {
  Value v = parse_document(R"("😀")");
  CHECK(v.as_string() == "\xF0\x9F\x98\x80");
}

TEST_CASE("field lookup") {
  Value v = parse_document(R"({"a":1})");
  CHECK(get_field(v, "a").has_value());
  CHECK(!get_field(v, "b").has_value());
  CHECK(!get_field(Value(3), "a").has_value());
}

TEST_CASE("registry") {
  DocRegistry docs;
  docs.add("d", Value(1));
  CHECK(docs.contains("d"));
  CHECK(docs.get("d") == Value(1));
  CHECK_THROWS_AS(docs.get("nope"), Error);
  CHECK_THROWS_AS(docs.load("x", "/nonexistent/file.json"), Error);
}

TEST_CASE("random values round trip through text") {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    Value v = gen::value(rng, 4);
    std::string text = serialize(v);
    INFO(text);
    CHECK(parse_document(text) == v);
    CHECK(parse_document(serialize(v, true)) == v);
  }
}
