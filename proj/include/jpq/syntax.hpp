#pragma once

#include <string_view>

#include "jpq/ast.hpp"
#include "jpq/term.hpp"

namespace jpq {

/// Parses a full program:
///   from doc("name") <pattern> (, doc("name") <pattern>)*
///   construct <construction-pattern>
///   [where <condition>]
/// `#` starts a line comment. Rejects rebound variables in the extraction
/// patterns and construction/condition variables no pattern binds.
QueryAst parse_query(std::string_view text);

ValuePattern parse_pattern(std::string_view text);
ConstructionPattern parse_construction(std::string_view text);
Condition parse_condition(std::string_view text);

/// mt(p): variables become variable terms; object, conjunctive and key-value
/// patterns become tuples (variable-free parts dropped); array and enumeration
/// patterns become self-indexed arrays; options become option terms.
Term derive_matching_term(const ValuePattern& p);
Term derive_matching_term(const KeyValuePattern& p);

/// Matching term of all `from` sources combined as one tuple in source order.
Term source_term(const QueryAst& q);

}  // namespace jpq
