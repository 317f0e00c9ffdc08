#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "jpq/error.hpp"
#include "jpq/matcher.hpp"
#include "jpq/term.hpp"

namespace jpq {

/// Restructuring rules of matching terms, in tie-breaking order.
enum class RewriteRule {
  TupleCommutation,         // (.., ti, ti+1, ..) -> (.., ti+1, ti, ..)
  TupleAssociation,         // (t1..tj, tj+1..tn) -> (t1..tj, (tj+1..tn)); inverse splices
  OptionCommutation,        // (..|ti|ti+1|..) -> (..|ti+1|ti|..)
  OptionAssociation,        // (t1|..|tj|tj+1|..|tn) -> (t1|..|tj|(tj+1|..|tn)); inverse splices
  TupleDuplication,         // t -> (t, t)
  ArrayFlattening,          // [t]_i -> ^[t]_i  inside an enclosing array
  OptionTupleDistribution,  // (t, t'|t'') -> (t, t') | (t, t'')
  ArrayTupleDistribution,   // (t, [t']_i) -> [(t, t')]_i  if var(t) & var(t') empty, not folded
  ArrayTplFolding,          // [(t, t')]_i -> [([(t, t')]_i, t%)]_{t%}
};

inline constexpr RewriteRule kAllRules[] = {
    RewriteRule::TupleCommutation,        RewriteRule::TupleAssociation,
    RewriteRule::OptionCommutation,       RewriteRule::OptionAssociation,
    RewriteRule::TupleDuplication,        RewriteRule::ArrayFlattening,
    RewriteRule::OptionTupleDistribution, RewriteRule::ArrayTupleDistribution,
    RewriteRule::ArrayTplFolding,
};

std::string_view rule_name(RewriteRule rule);

/// One rule application. `param` is the swap position for commutations and
/// the split point for associations; an inverse association splices the
/// nested component at `param` back into its parent.
struct RewriteStep {
  RewriteRule rule = RewriteRule::TupleCommutation;
  TermPath path;
  int param = 0;
  bool inverse = false;

  bool operator==(const RewriteStep&) const = default;
};

std::string to_string(const RewriteStep& step);

/// Steps that restructure `source` into `result`; `result` covers the target
/// the route was inferred for.
struct RewriteRoute {
  Term source;
  Term result;
  std::vector<RewriteStep> steps;
};

/// Thrown when a rule's left-hand side or side condition does not hold.
class RuleInapplicable : public Error {
 public:
  explicit RuleInapplicable(const std::string& what) : Error(ErrorKind::Query, what) {}
};

class RouteError : public Error {
 public:
  enum class Reason { InvalidConstruction, SearchBoundExceeded };
  RouteError(Reason reason, const std::string& what) : Error(ErrorKind::Query, what), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

Term apply_rule(RewriteRule rule, const Term& t, const TermPath& path, int param = 0, bool inverse = false);
Term apply_step(const RewriteStep& step, const Term& t);
Term replay(const Term& source, const std::vector<RewriteStep>& steps);

/// True iff the array at `path` sits inside an enclosing array with only
/// tuples, options and flattened arrays in between.
bool has_enclosing_array(const Term& root, const TermPath& path);

/// True iff `r` can serve a construction whose backbone is `target`: equal up
/// to tuple association/commutation, option order, dropping tuple components
/// the target does not mention, and unspecified target index terms.
bool covers(const Term& r, const Term& target);

/// For an option `r` covering option `target`: the target branch each branch of r maps to.
std::vector<int> option_correspondence(const Term& r, const Term& target);

/// Bounds that keep the otherwise infinite rewriting system finite.
/// Duplication of a subterm is allowed only while every variable in it occurs
/// fewer times than in the target; folding by key t only while fewer arrays
/// are folded by t than the target asks for.
struct SearchGuide {
  explicit SearchGuide(const Term& target);
  bool may_duplicate(const Term& current, const Term& node) const;
  bool may_fold(const Term& current, const Term& key) const;

  std::vector<std::pair<std::string, int>> var_counts;
  std::vector<std::pair<std::string, int>> fold_counts;  // canonical key -> count
};

int folded_count(const Term& t, const std::string& key_canonical);

struct SearchLimits {
  int max_depth = 14;
  std::size_t max_expansions = 2'000'000;
};

/// Iterative deepening over rule applications (modulo tuple association and
/// commutation) with memoized canonical forms. Throws RouteError.
RewriteRoute infer_route(const Term& source, const Term& target, const SearchLimits& limits = {});

/// Consistency requirement produced by filtering: a combination of array
/// elements/option branches (its tag context) is admitted iff some surviving
/// support tuple contains every tag of the context that lies in `domain`.
struct JoinConstraint {
  std::set<Tag> domain;
  std::vector<TagSet> allowed;  // each sorted

  bool admits(const TagSet& context) const;
};

/// Applies the route's data semantics to a result shaped as route.source.
MatchResult transform(const MatchResult& r, const RewriteRoute& route,
                      const std::vector<JoinConstraint>& constraints = {});
MatchResult transform_step(const MatchResult& r, const Term& before, const RewriteStep& step,
                           const std::vector<JoinConstraint>& constraints = {});

/// One line per step: `rule-name @ path  =>  term`.
std::string explain(const RewriteRoute& route);

}  // namespace jpq
