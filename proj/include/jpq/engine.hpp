#pragma once

#include <string>
#include <string_view>

#include "jpq/ast.hpp"
#include "jpq/matcher.hpp"
#include "jpq/rewriter.hpp"
#include "jpq/term.hpp"
#include "jpq/value.hpp"

namespace jpq {

/// A validated query with its inferred restructuring route.
struct Plan {
  QueryAst query;
  Term source;  // tuple of the sources' matching terms
  Term target;  // backbone of the construct clause
  RewriteRoute route;
};

Plan plan_query(const QueryAst& q);
Plan plan_query(std::string_view text);

/// Matches every source with one tag counter; a failed source fails the whole result.
MatchResult extract(const QueryAst& q, const DocRegistry& docs);

/// match -> filter -> resolve options -> transform -> build.
Value execute(const Plan& plan, const DocRegistry& docs);

/// Extraction term, backbone and route, one step per line.
std::string explain(const Plan& plan);

}  // namespace jpq
