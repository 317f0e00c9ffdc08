#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jpq/ast.hpp"
#include "jpq/term.hpp"
#include "jpq/value.hpp"

namespace jpq {

/// Identifies an array element or an option branch of one extraction run.
/// Filtering records surviving combinations as sets of tags.
using Tag = std::uint32_t;
using TagSet = std::vector<Tag>;

/// Structured binding result, shaped as an instance of the pattern's matching
/// term: Binding <-> variable, Tuple <-> tuple, Array <-> array, Option <-> option.
struct MatchResult {
  enum class Kind { Failed, Unit, Binding, Tuple, Array, Option };

  Kind kind = Kind::Failed;
  std::string var;                  // Binding
  Value value;                      // Binding
  std::vector<MatchResult> items;   // tuple components, array elements, option branches
  std::vector<TagSet> tags;         // Array: per element; Option: per branch
  int selected = -1;                // Option: chosen branch once resolved

  static MatchResult failed() { return MatchResult{}; }
  static MatchResult unit();
  static MatchResult binding(std::string var, Value v);
  /// Fails if any part failed; drops units, splices nested tuples, collapses singletons.
  static MatchResult tuple(std::vector<MatchResult> parts);
  static MatchResult array(std::vector<MatchResult> elements, std::vector<TagSet> tags);
  /// Splices nested options (keeping their branch tags and selection).
  static MatchResult option(std::vector<MatchResult> branches, std::vector<TagSet> tags);

  bool ok() const { return kind != Kind::Failed; }
  bool is_option() const { return kind == Kind::Option; }
  bool is_array() const { return kind == Kind::Array; }
  /// Option branch that is in effect: the selected one, else the first valid one.
  int effective_branch() const;
};

/// Structural equality of data and selections; tags are ignored.
bool operator==(const MatchResult& a, const MatchResult& b);

/// Deep structural equality of data only (variable names and values).
bool same_data(const MatchResult& a, const MatchResult& b);

/// Extraction with a shared tag counter so that every array element and option
/// branch across all sources gets a distinct tag.
class Matcher {
 public:
  MatchResult value(const ValuePattern& p, const Value& v);
  MatchResult children(const KeyValuePattern& p, const Value& v);
  MatchResult descendants(const ValuePattern& p, const Value& v);
  /// Matches one object member against a key-value pattern.
  MatchResult pair(const KeyValuePattern& p, const std::string& key, const Value& v);
  /// Finds the first member of `object` matching `p` (each option branch searches independently).
  MatchResult in_object(const KeyValuePattern& p, const Value& object);

  Tag next_tag() { return next_++; }

 private:
  MatchResult make_option(std::vector<MatchResult> branches);
  void walk(const ValuePattern& p, const Value& v, std::vector<MatchResult>& out, std::vector<TagSet>& tags);

  Tag next_ = 1;
};

MatchResult match_value(const ValuePattern& p, const Value& v);
MatchResult match_children(const KeyValuePattern& p, const Value& v);
MatchResult match_descendants(const ValuePattern& p, const Value& v);
bool match_string_predicate(const StringPredicate& r, std::string_view s);

/// Renders in the `( [ ($r -> "president", ...); ... ], ... )` notation.
/// Resolved options show only their selected branch, spliced into the
/// surrounding tuple like nested tuples.
std::string render(const MatchResult& r);

/// True iff the shape of r is an instance of t.
bool instantiates(const MatchResult& r, const Term& t);

}  // namespace jpq
