#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jpq/value.hpp"

namespace jpq {

/// Key/value string test where `?` matches any (possibly empty) character
/// sequence; every other character is literal. Anchored at both ends.
struct StringPredicate {
  std::string pattern;

  bool matches(std::string_view subject) const;
  bool has_wildcard() const { return pattern.find('?') != std::string::npos; }
  bool operator==(const StringPredicate&) const = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CompareOp op);

/// Applies only to atoms. A bare string literal in a pattern is a string
/// predicate; other bare literals and `(op literal)` forms are comparisons.
struct ValuePredicate {
  enum class Kind { String, Compare };
  Kind kind = Kind::Compare;
  StringPredicate text;
  CompareOp op = CompareOp::Eq;
  Value literal;

  bool matches(const Value& v) const;
  bool operator==(const ValuePredicate&) const = default;
};

struct ValuePattern;

/// p_k ::= v:p_v | r_s:p_v | (v r_s):p_v | *:p_v | p_k|p_k
struct KeyValuePattern {
  enum class Kind { Pair, Option };
  Kind kind = Kind::Pair;
  std::optional<std::string> key_var;
  std::optional<StringPredicate> key_pred;
  std::vector<ValuePattern> value;             // exactly one for Pair
  std::vector<KeyValuePattern> alternatives;   // Option branches, textual order

  bool wildcard_key() const { return kind == Kind::Pair && !key_var && !key_pred; }
  /// A literal key without wildcards can match at most one member.
  bool definitive() const { return kind == Kind::Pair && key_pred && !key_pred->has_wildcard(); }
};

/// p_v ::= v | r_v | * | {p_k,...} | [p_v] | <p_v,...> | p_v|p_v | /p_k | //p_v
struct ValuePattern {
  enum class Kind { Variable, Predicate, Wildcard, Object, Array, Conjunction, Option, Children, Descendants };
  Kind kind = Kind::Wildcard;
  std::string var;
  ValuePredicate pred;
  std::vector<KeyValuePattern> keys;  // Object members; Children holds one
  std::vector<ValuePattern> items;    // Array/Descendants: one; Conjunction/Option: n
};

bool operator==(const KeyValuePattern& a, const KeyValuePattern& b);
bool operator==(const ValuePattern& a, const ValuePattern& b);

/// Construction patterns: a matching-term backbone decorated with constants.
struct ConstructionPattern {
  enum class Kind { Literal, Variable, Object, Array, Flattened, Option, Call, Distinct };
  enum class Order { None, Asc, Desc };
  Kind kind = Kind::Literal;
  Value literal;
  std::string name;                         // variable or function name
  std::vector<std::string> keys;            // Object member keys, parallel to items
  std::vector<ConstructionPattern> items;   // members / element / branches / args
  std::vector<ConstructionPattern> group;   // Array: optional groupby index term
  std::vector<ConstructionPattern> order_by;  // Array: optional explicit sort key
  Order order = Order::None;
};

bool operator==(const ConstructionPattern& a, const ConstructionPattern& b);

/// Operand of a where-clause predicate.
struct Operand {
  enum class Kind { Literal, Variable, Field, Call, ArrayTerm };
  Kind kind = Kind::Literal;
  Value literal;
  std::string name;                 // variable or function name
  std::vector<std::string> fields;  // Field: $v."a"."b"
  std::vector<Operand> args;        // Call arguments
  std::vector<std::string> vars;    // ArrayTerm: variables inside [...]
};

bool operator==(const Operand& a, const Operand& b);

struct Condition {
  enum class Kind { Test, Compare, Not, And, Or, Par, With, ForEach, ForSome };
  Kind kind = Kind::Test;
  CompareOp op = CompareOp::Eq;
  Operand lhs;  // Test: a boolean call
  Operand rhs;
  std::vector<Condition> items;     // Not: 1, And/Or/Par/With: 2, quantifiers: body
  std::vector<std::string> bound;   // quantified term variables
  std::vector<std::string> range;   // range array variables (defaults to bound)
};

bool operator==(const Condition& a, const Condition& b);

struct Source {
  std::string doc;
  ValuePattern pattern;
  bool operator==(const Source&) const = default;
};

struct QueryAst {
  std::vector<Source> sources;
  ConstructionPattern construct;
  std::optional<Condition> where;
  bool operator==(const QueryAst&) const = default;
};

/// Variables bound by a pattern in textual order.
std::vector<std::string> pattern_variables(const ValuePattern& p);
std::vector<std::string> pattern_variables(const KeyValuePattern& p);
std::vector<std::string> construction_variables(const ConstructionPattern& cp);
std::vector<std::string> condition_variables(const Condition& c);

// Printers producing text that reparses to an identical AST.
std::string unparse(const ValuePattern& p);
std::string unparse(const KeyValuePattern& p);
std::string unparse(const ConstructionPattern& cp);
std::string unparse(const Condition& c);
std::string unparse(const QueryAst& q);
std::string quote(std::string_view s);
std::string literal_text(const Value& v);

}  // namespace jpq
