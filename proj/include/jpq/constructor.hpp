#pragma once

#include "jpq/ast.hpp"
#include "jpq/matcher.hpp"
#include "jpq/rewriter.hpp"
#include "jpq/term.hpp"
#include "jpq/value.hpp"

namespace jpq {

/// The matching term underlying a construction pattern: constants erased,
/// objects and calls become tuples, array constructors array terms (indexed
/// by their groupby term, otherwise unspecified).
Term backbone(const ConstructionPattern& cp);

/// Route from the extraction term to one that covers the backbone.
RewriteRoute validate_and_plan(const Term& extraction, const ConstructionPattern& cp);

/// Instantiates cp over a result shaped as `term` (the route's result).
/// A failed result builds `null`.
Value build(const ConstructionPattern& cp, const Term& term, const MatchResult& r);

}  // namespace jpq
