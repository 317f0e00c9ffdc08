#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jpq/value.hpp"

namespace jpq {

struct CliConfig {
  std::vector<std::pair<std::string, std::string>> docs;  // name, path
  std::optional<std::string> query_file;
  std::optional<std::string> query_text;
  bool explain = false;
  bool pretty = false;
  std::optional<std::string> output;  // stdout when absent
};

enum ExitStatus { kExitOk = 0, kExitQuery = 1, kExitData = 2, kExitInternal = 3 };

struct RunResult {
  int status = kExitOk;
  std::string out;  // explain text (if requested) followed by the serialized result
  std::string err;  // diagnostics
};

/// Parses `name=path`; nullopt when either side is empty.
std::optional<std::pair<std::string, std::string>> parse_doc_binding(const std::string& arg);

/// Runs one query against an already loaded registry.
RunResult run_query(const std::string& text, const DocRegistry& docs, bool explain, bool pretty);

/// Loads the documents, reads the query, runs it and writes the output file
/// if one is configured (otherwise the caller prints `out`).
RunResult run_query(const CliConfig& config);

/// Line-oriented session: `:load name path`, `:run <query>`,
/// `:explain <query>`, `:help`, `:quit`.
class Repl {
 public:
  explicit Repl(DocRegistry docs = {}, bool pretty = false) : docs_(std::move(docs)), pretty_(pretty) {}

  /// Returns the exit status of the session (0 after :quit or end of input).
  int run(std::istream& in, std::ostream& out, std::ostream& err, bool prompt = false);

  /// Executes one command line; false once the session should end.
  bool command(const std::string& line, std::ostream& out, std::ostream& err);

 private:
  DocRegistry docs_;
  bool pretty_;
};

}  // namespace jpq
