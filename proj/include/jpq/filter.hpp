#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "jpq/ast.hpp"
#include "jpq/matcher.hpp"
#include "jpq/rewriter.hpp"
#include "jpq/term.hpp"
#include "jpq/value.hpp"

namespace jpq {

/// Argument of a builtin: a value, an array (only its size matters), or a
/// field that is not there.
struct Arg {
  enum class Kind { Absent, Scalar, Array };
  Kind kind = Kind::Absent;
  Value value;
  std::size_t size = 0;

  static Arg absent() { return Arg{}; }
  static Arg scalar(Value v);
  static Arg array(std::size_t n);
};

/// Builtin library: count, notnull, endWith, startWith, contains, and the
/// comparison operators by their symbols. Throws Error(Type) off-signature,
/// Error(Query) for unknown names.
Value eval_builtin(std::string_view name, const std::vector<Arg>& args);
bool compare(CompareOp op, const Arg& lhs, const Arg& rhs);

/// Leaf: tuple of argument variables, or the array term for quantified and
/// count conditions. and/or/not merge; par/with keep a pair.
Term condition_argument_term(const Condition& c);

/// Rejects and/or/not compositions whose variables live in different branches
/// of one option, and par/with nested inside boolean connectives.
void validate_condition(const Condition& c, const Term& source);

struct Filtered {
  MatchResult result;
  /// Surviving combinations across arrays that pruning alone cannot express;
  /// enforced when distribution pairs elements later.
  std::vector<JoinConstraint> joins;
};

/// Support-tuple filtering of r, shaped as `source`.
Filtered filter(const MatchResult& r, const Term& source, const Condition& c);

/// Selects the first valid branch of every option; options left without a
/// valid branch fail, which drops array elements and fails tuples.
MatchResult resolve_options(const MatchResult& r);

}  // namespace jpq
