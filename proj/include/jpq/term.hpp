#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace jpq {

/// t ::= v | (t,...,t) | t|...|t | [t]_i | ^[t]_i | t%
///
/// The unit term is the empty tuple. Array terms carry their index term; an
/// array built from original matching results is indexed by its own element
/// term. A folded array is one whose index is a distinct term.
struct Term {
  enum class Kind { Var, Tuple, Option, Array, Distinct };

  Kind kind = Kind::Tuple;
  std::string name;                    // Var
  std::vector<Term> items;             // Tuple/Option components; Array/Distinct: one child
  std::shared_ptr<const Term> index;   // Array; null means "unspecified" (targets only)
  bool flattened = false;              // Array: ^[t]

  static Term var(std::string name);
  static Term unit() { return Term{}; }
  static Term tuple(std::vector<Term> items);   // normalizing: splices, drops units, collapses
  static Term option(std::vector<Term> items);  // normalizing: splices nested options
  static Term array(Term elem);                 // self-indexed
  static Term array(Term elem, Term index, bool flattened = false);
  static Term array_unindexed(Term elem, bool flattened = false);
  static Term distinct(Term inner);

  bool is_unit() const { return kind == Kind::Tuple && items.empty(); }
  bool folded() const { return kind == Kind::Array && index && index->kind == Kind::Distinct; }
  const Term& elem() const { return items.front(); }
};

bool operator==(const Term& a, const Term& b);

/// Position of a subterm: child indices from the root. Array and distinct
/// nodes have a single child at index 0; index terms are not addressable.
using TermPath = std::vector<int>;

std::string to_string(const TermPath& path);

/// Compact rendering, e.g. `($r, $po | [$pa])`, `[($n, ^[$id])]_{$id}`.
/// Self indices are omitted.
std::string to_string(const Term& t);

/// Parses the rendering above (self index implied when `_{}` is absent).
/// `[t]_?` denotes an unspecified index.
Term parse_term(std::string_view text);

/// Canonical form modulo tuple association/commutation and option association.
/// Option branch order is kept unless `unordered_options` is set.
std::string canonical(const Term& t, bool with_index = true, bool unordered_options = false);

/// Variables occurring in t (index terms excluded).
std::set<std::string> var_set(const Term& t);

/// Occurrence count of each variable (index terms excluded).
void count_vars(const Term& t, std::vector<std::pair<std::string, int>>& counts);
int count_var(const Term& t, const std::string& name);

const Term& subterm(const Term& t, const TermPath& path);
Term& subterm(Term& t, const TermPath& path);

/// Depth in the tuple/option/array nesting sense (a variable has depth 0).
int depth(const Term& t);

}  // namespace jpq
