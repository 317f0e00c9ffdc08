#include <fstream>
#include <sstream>

#include "doctest.h"
#include "jpq/cli.hpp"

using namespace jpq;

namespace {

const std::string kUniv = std::string(JPQ_SOURCE_DIR) + "/data/univ.json";

DocRegistry univ() {
  DocRegistry docs;
  docs.load("univ", kUniv);
  return docs;
}

}  // namespace

TEST_CASE("doc bindings") {
  auto b = parse_doc_binding("univ=data/univ.json");
  REQUIRE(b);
  CHECK(b->first == "univ");
  CHECK(b->second == "data/univ.json");
  CHECK(!parse_doc_binding("univ"));
  CHECK(!parse_doc_binding("=x"));
  CHECK(!parse_doc_binding("x="));
}

TEST_CASE("exit statuses") {
  DocRegistry docs = univ();
  RunResult ok = run_query(R"(from doc("univ") {"president":{"ID":$i}} construct $i)", docs, false, false);
  CHECK(ok.status == kExitOk);
  CHECK(ok.out == "\"0001\"\n");
  CHECK(run_query("from doc(\"univ\") {", docs, false, false).status == kExitQuery);
  CHECK(run_query(R"(from doc("univ") $x construct $y)", docs, false, false).status == kExitQuery);
  RunResult missing = run_query(R"(from doc("nope") $x construct $x)", docs, false, false);
  CHECK(missing.status == kExitData);
  CHECK(!missing.err.empty());
}

TEST_CASE("explain output") {
  RunResult r = run_query(R"(from doc("univ") {"schools":[{"name":$n}]} construct [$n])", univ(), true, false);
  CHECK(r.status == kExitOk);
  CHECK(r.out.find("extraction term:") != std::string::npos);
  CHECK(r.out.find("route (") != std::string::npos);
}

TEST_CASE("config runs load files and write output") {
  CliConfig c;
  c.docs.push_back({"univ", kUniv});
  c.query_text = R"(from doc("univ") {"president":{"ID":$i}} construct {"id":$i})";
  c.output = "cli_test_output.json";
  RunResult r = run_query(c);
  CHECK(r.status == kExitOk);
  std::ifstream in("cli_test_output.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"0001\"") != std::string::npos);
  std::remove("cli_test_output.json");

  CliConfig bad;
  bad.docs.push_back({"x", "/nonexistent.json"});
  bad.query_text = R"(from doc("x") $a construct $a)";
  CHECK(run_query(bad).status == kExitData);
}

TEST_CASE("repl session") {
  std::istringstream in(":load univ " + kUniv + "\n# comment\n:run from doc(\"univ\") {\"president\":{\"ID\":$i}} construct $i\n:bogus\n:quit\n:run ignored\n");
  std::ostringstream out, err;
  Repl repl;
  CHECK(repl.run(in, out, err) == 0);
  CHECK(out.str().find("\"0001\"") != std::string::npos);
  CHECK(!err.str().empty());
}

TEST_CASE("repl reports query errors and keeps going") {
  std::istringstream in(":run from doc(\"u\") $x construct $x\n:help\n");
  std::ostringstream out, err;
  Repl repl;
  CHECK(repl.run(in, out, err) == 0);
  CHECK(!err.str().empty());
  CHECK(out.str().find(":load") != std::string::npos);
}
