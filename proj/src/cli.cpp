#include "jpq/cli.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "jpq/engine.hpp"
#include "jpq/error.hpp"

namespace jpq {

namespace {

int status_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Data: return kExitData;
    case ErrorKind::Internal: return kExitInternal;
    default: return kExitQuery;
  }
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<std::pair<std::string, std::string>> parse_doc_binding(const std::string& arg) {
  auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) return std::nullopt;
  return std::make_pair(arg.substr(0, eq), arg.substr(eq + 1));
}

RunResult run_query(const std::string& text, const DocRegistry& docs, bool explain_route, bool pretty) {
  RunResult r;
  try {
    Plan plan = plan_query(text);
    if (explain_route) r.out += explain(plan);
    r.out += serialize(execute(plan, docs), pretty) + "\n";
  } catch (const Error& e) {
    r.status = status_for(e);
    r.out.clear();
    r.err = std::string("error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    r.status = kExitInternal;
    r.out.clear();
    r.err = std::string("internal error: ") + e.what() + "\n";
  }
  return r;
}

RunResult run_query(const CliConfig& config) {
  RunResult r;
  DocRegistry docs;
  try {
    for (const auto& [name, path] : config.docs) docs.load(name, path);
  } catch (const Error& e) {
    r.status = kExitData;
    r.err = std::string("error: ") + e.what() + "\n";
    return r;
  }
  std::string text;
  if (config.query_text) {
    text = *config.query_text;
  } else if (config.query_file) {
    std::ifstream in(*config.query_file, std::ios::binary);
    if (!in) {
      r.status = kExitQuery;
      r.err = "error: cannot read query file " + *config.query_file + "\n";
      return r;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    r.status = kExitQuery;
    r.err = "error: no query given (use --query or -e)\n";
    return r;
  }
  r = run_query(text, docs, config.explain, config.pretty);
  if (r.status == kExitOk && config.output) {
    std::ofstream out(*config.output, std::ios::binary);
    out << r.out;
    if (!out) {
      r.status = kExitData;
      r.err = "error: cannot write " + *config.output + "\n";
    }
    r.out.clear();
  }
  return r;
}

bool Repl::command(const std::string& raw, std::ostream& out, std::ostream& err) {
  std::string line = trim(raw);
  if (line.empty() || line[0] == '#') return true;
  std::string cmd = line.substr(0, line.find_first_of(" \t"));
  std::string rest = trim(line.substr(cmd.size()));
  if (cmd == ":quit" || cmd == ":q") return false;
  if (cmd == ":help") {
    out << ":load name path    register a JSON document as doc(\"name\")\n"
           ":run <query>       run a query\n"
           ":explain <query>   show matching term, backbone and route, then run\n"
           ":quit              leave\n";
    return true;
  }
  if (cmd == ":load") {
    std::istringstream args(rest);
    std::string name, path;
    args >> name;
    std::getline(args, path);
    path = trim(path);
    if (name.empty() || path.empty()) {
      err << "error: usage: :load name path\n";
      return true;
    }
    try {
      docs_.load(name, path);
      out << "loaded " << name << "\n";
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
    }
    return true;
  }
  if (cmd == ":run" || cmd == ":explain") {
    RunResult r = run_query(rest, docs_, cmd == ":explain", pretty_);
    out << r.out;
    err << r.err;
    return true;
  }
  err << "error: unknown command " << cmd << " (try :help)\n";
  return true;
}

int Repl::run(std::istream& in, std::ostream& out, std::ostream& err, bool prompt) {
  std::string line;
  while (true) {
    if (prompt) out << "jpq> " << std::flush;
    if (!std::getline(in, line)) break;
    if (!command(line, out, err)) break;
    out.flush();
  }
  return kExitOk;
}

}  // namespace jpq
