#include <unistd.h>

#include <iostream>

#include "CLI11.hpp"
#include "jpq/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"jpq: pattern-based queries over JSON documents"};
  std::vector<std::string> docs;
  jpq::CliConfig config;
  std::string query_file, query_text;
  bool repl = false;
  std::string output;
  app.add_option("--doc", docs, "Bind doc(\"name\") to a JSON file, as name=path (repeatable)");
  auto* qf = app.add_option("--query", query_file, "Read the query from a file");
  auto* qe = app.add_option("-e", query_text, "Query text");
  qf->excludes(qe);
  app.add_flag("--explain", config.explain, "Print the matching term, construction backbone and route");
  app.add_flag("--pretty", config.pretty, "Indent the output");
  app.add_option("--output", output, "Write the result to a file instead of standard output");
  app.add_flag("--repl", repl, "Start an interactive session");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : jpq::kExitQuery;
  }

  for (const auto& d : docs) {
    auto binding = jpq::parse_doc_binding(d);
    if (!binding) {
      std::cerr << "error: --doc expects name=path, got " << d << "\n";
      return jpq::kExitQuery;
    }
    config.docs.push_back(*binding);
  }

  if (repl) {
    jpq::DocRegistry registry;
    try {
      for (const auto& [name, path] : config.docs) registry.load(name, path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return jpq::kExitData;
    }
    jpq::Repl session(std::move(registry), config.pretty);
    return session.run(std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0);
  }

  if (*qf) config.query_file = query_file;
  if (*qe) config.query_text = query_text;
  if (!output.empty()) config.output = output;
  jpq::RunResult r = jpq::run_query(config);
  std::cout << r.out;
  std::cerr << r.err;
  return r.status;
}
