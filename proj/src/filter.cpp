#include "jpq/filter.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace jpq {

Arg Arg::scalar(Value v) {
  Arg a;
  a.kind = Kind::Scalar;
  a.value = std::move(v);
  return a;
}

Arg Arg::array(std::size_t n) {
  Arg a;
  a.kind = Kind::Array;
  a.size = n;
  return a;
}

namespace {

std::string type_name(const Arg& a) {
  if (a.kind == Arg::Kind::Absent) return "absent";
  if (a.kind == Arg::Kind::Array) return "array term";
  const Value& v = a.value;
  if (v.is_empty()) return "empty";
  if (v.is_bool()) return "boolean";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

[[noreturn]] void type_error(std::string_view fn, const std::string& detail) {
  throw Error(ErrorKind::Type, std::string(fn) + ": " + detail);
}

// Absent and empty values make a predicate false rather than an error.
bool missing(const Arg& a) { return a.kind == Arg::Kind::Absent || (a.kind == Arg::Kind::Scalar && a.value.is_empty()); }

void arity(std::string_view fn, const std::vector<Arg>& args, std::size_t n) {
  if (args.size() != n) {
    type_error(fn, "expects " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()));
  }
}

Value string_test(std::string_view fn, const std::vector<Arg>& args) {
  arity(fn, args, 2);
  if (missing(args[0]) || missing(args[1])) return Value(false);
  for (const Arg& a : args) {
    if (a.kind != Arg::Kind::Scalar || !a.value.is_string()) type_error(fn, "expects strings, got " + type_name(a));
  }
  const std::string& s = args[0].value.as_string();
  const std::string& x = args[1].value.as_string();
  if (fn == "endWith") return Value(s.size() >= x.size() && s.compare(s.size() - x.size(), x.size(), x) == 0);
  if (fn == "startWith") return Value(s.rfind(x, 0) == 0);
  return Value(s.find(x) != std::string::npos);
}

}  // namespace

bool compare(CompareOp op, const Arg& lhs, const Arg& rhs) {
  if (missing(lhs) || missing(rhs)) return false;
  if (lhs.kind == Arg::Kind::Array || rhs.kind == Arg::Kind::Array) {
    type_error(to_string(op), "cannot compare an array term; use count");
  }
  const Value& a = lhs.value;
  const Value& b = rhs.value;
  switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return !(a == b);
    default: break;
  }
  int c = 0;
  if (a.is_number() && b.is_number()) {
    c = a.as_number() < b.as_number() ? -1 : (a.as_number() > b.as_number() ? 1 : 0);
  } else if (a.is_string() && b.is_string()) {
    c = a.as_string().compare(b.as_string());
  } else {
    type_error(to_string(op), "cannot order " + type_name(lhs) + " against " + type_name(rhs));
  }
  switch (op) {
    case CompareOp::Lt: return c < 0;
    case CompareOp::Le: return c <= 0;
    case CompareOp::Gt: return c > 0;
    case CompareOp::Ge: return c >= 0;
    default: return false;
  }
}

Value eval_builtin(std::string_view name, const std::vector<Arg>& args) {
  static const std::map<std::string_view, CompareOp> ops = {
      {"=", CompareOp::Eq}, {"==", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
      {"<=", CompareOp::Le}, {">", CompareOp::Gt}, {">=", CompareOp::Ge},
  };
  if (auto it = ops.find(name); it != ops.end()) {
    arity(name, args, 2);
    return Value(compare(it->second, args[0], args[1]));
  }
  if (name == "count") {
    arity(name, args, 1);
    const Arg& a = args[0];
    if (a.kind == Arg::Kind::Array) return Value(static_cast<double>(a.size));
    if (a.kind == Arg::Kind::Scalar && a.value.is_array()) return Value(static_cast<double>(a.value.as_array().size()));
    type_error(name, "expects an array, got " + type_name(a));
  }
  if (name == "notnull") {
    arity(name, args, 1);
    return Value(!missing(args[0]));
  }
  if (name == "endWith" || name == "startWith" || name == "contains") return string_test(name, args);
  throw Error(ErrorKind::Query, "unknown function " + std::string(name));
}

// ---------------------------------------------------------------------------
// argument terms and validation

namespace {

using CK = Condition::Kind;
using OK = Operand::Kind;

Term vars_tuple(const std::vector<std::string>& vars) {
  std::vector<Term> items;
  for (const auto& v : vars) items.push_back(Term::var(v));
  return Term::tuple(std::move(items));
}

void operand_terms(const Operand& o, std::vector<Term>& out) {
  switch (o.kind) {
    case OK::Literal: return;
    case OK::Variable:
    case OK::Field: out.push_back(Term::var(o.name)); return;
    case OK::ArrayTerm: out.push_back(Term::array(vars_tuple(o.vars))); return;
    case OK::Call:
      for (const Operand& a : o.args) operand_terms(a, out);
      return;
  }
}

void leaf_terms(const Condition& c, std::vector<Term>& out) {
  switch (c.kind) {
    case CK::Test: operand_terms(c.lhs, out); return;
    case CK::Compare:
      operand_terms(c.lhs, out);
      operand_terms(c.rhs, out);
      return;
    case CK::ForEach:
    case CK::ForSome: out.push_back(Term::array(vars_tuple(c.range))); return;
    case CK::Not:
    case CK::And:
    case CK::Or:
      for (const Condition& i : c.items) leaf_terms(i, out);
      return;
    case CK::Par:
    case CK::With: out.push_back(condition_argument_term(c)); return;
  }
}

bool is_boolean(const Condition& c) { return c.kind != CK::Par && c.kind != CK::With; }

std::string_view connective(const Condition& c) {
  switch (c.kind) {
    case CK::And: return "and";
    case CK::Or: return "or";
    case CK::Not: return "not";
    case CK::Par: return "par";
    case CK::With: return "with";
    default: return "predicate";
  }
}

// Variables a boolean condition needs from outside its quantifier bodies, plus
// quantified and array-term variables (which stand for their arrays).
void condition_vars(const Condition& c, std::set<std::string>& out) {
  std::vector<Term> terms;
  leaf_terms(c, terms);
  for (const Term& t : terms) {
    for (const auto& v : var_set(t)) out.insert(v);
  }
  if (c.kind == CK::ForEach || c.kind == CK::ForSome) condition_vars(c.items.front(), out);
}

// Finds an option whose different branches hold variables of `vars`.
const Term* divergent_option(const Term& t, const std::set<std::string>& vars) {
  if (t.kind == Term::Kind::Option) {
    int hit = 0;
    for (const Term& b : t.items) {
      auto bv = var_set(b);
      if (std::any_of(vars.begin(), vars.end(), [&](const std::string& v) { return bv.count(v) != 0; })) ++hit;
    }
    if (hit >= 2) return &t;
  }
  for (const Term& c : t.items) {
    if (const Term* o = divergent_option(c, vars)) return o;
  }
  return nullptr;
}

void validate_boolean(const Condition& c, const Term& source) {
  for (const Condition& i : c.items) {
    if (!is_boolean(i)) {
      throw Error(ErrorKind::Query, "invalid-composition: `" + std::string(connective(i)) + "` cannot appear inside `" +
                                        std::string(connective(c)) + "`; parenthesize it at the top of the where clause");
    }
  }
  std::set<std::string> vars;
  condition_vars(c, vars);
  if (const Term* o = divergent_option(source, vars)) {
    std::string names;
    for (const auto& v : vars) names += (names.empty() ? "$" : ", $") + v;
    throw Error(ErrorKind::Query, "invalid-composition: `" + std::string(connective(c)) + "` over " + names +
                                      " combines variables from different branches of the option " + to_string(*o) +
                                      ", which is not a valid function; use `par` to filter each branch separately");
  }
  for (const Condition& i : c.items) validate_boolean(i, source);
}

}  // namespace

Term condition_argument_term(const Condition& c) {
  if (c.kind == CK::Par || c.kind == CK::With) {
    Term t;
    t.items = {condition_argument_term(c.items[0]), condition_argument_term(c.items[1])};
    return t;
  }
  std::vector<Term> terms;
  leaf_terms(c, terms);
  std::vector<Term> unique;
  for (auto& t : terms) {
    if (std::find(unique.begin(), unique.end(), t) == unique.end()) unique.push_back(std::move(t));
  }
  return Term::tuple(std::move(unique));
}

void validate_condition(const Condition& c, const Term& source) {
  if (c.kind == CK::With) {
    validate_condition(c.items[0], source);
    validate_condition(c.items[1], source);
    return;
  }
  if (c.kind == CK::Par) {
    for (const Condition& i : c.items) {
      if (i.kind == CK::With) {
        throw Error(ErrorKind::Query, "invalid-composition: operands of `par` must be predicate conditions, not `with`");
      }
      validate_condition(i, source);
    }
    return;
  }
  validate_boolean(c, source);
}

// ---------------------------------------------------------------------------
// support-tuple evaluation

namespace {

using MK = MatchResult::Kind;

bool contains_node(const Term& t, const Term* n) {
  if (&t == n) return true;
  return std::any_of(t.items.begin(), t.items.end(), [&](const Term& c) { return contains_node(c, n); });
}

// Deepest array node whose element term binds every variable in `vars`.
const Term* array_node(const Term& t, const std::vector<std::string>& vars) {
  const Term* found = nullptr;
  if (t.kind == Term::Kind::Array) {
    auto in = var_set(t.elem());
    if (std::all_of(vars.begin(), vars.end(), [&](const std::string& v) { return in.count(v) != 0; })) found = &t;
  }
  for (const Term& c : t.items) {
    if (const Term* d = array_node(c, vars)) return d;
  }
  return found;
}

struct Env {
  std::vector<std::pair<std::string, const Value*>> vars;
  std::vector<std::pair<const Term*, const MatchResult*>> arrays;
  TagSet tags;

  void absorb(const Env& o) {
    vars.insert(vars.end(), o.vars.begin(), o.vars.end());
    arrays.insert(arrays.end(), o.arrays.begin(), o.arrays.end());
    tags.insert(tags.end(), o.tags.begin(), o.tags.end());
  }
  const Value* var(const std::string& name) const {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    return nullptr;
  }
  const MatchResult* array(const Term* node) const {
    for (auto it = arrays.rbegin(); it != arrays.rend(); ++it) {
      if (it->first == node) return it->second;
    }
    return nullptr;
  }
};

struct Targets {
  std::set<std::string> vars;
  std::set<const Term*> arrays;

  bool relevant(const Term& t) const {
    if (arrays.count(&t)) return true;
    if (t.kind == Term::Kind::Var) return vars.count(t.name) != 0;
    return std::any_of(t.items.begin(), t.items.end(), [&](const Term& c) { return relevant(c); });
  }
};

class Evaluator {
 public:
  explicit Evaluator(const Term& source) : source_(source) {}

  // Supports of c over the data: every combination of array elements and
  // option branches that binds the condition's arguments.
  std::vector<Env> supports(const Condition& c, const MatchResult& data) {
    Targets t;
    gather(c, nullptr, t);
    return enumerate(source_, data, t);
  }

  bool holds(const Condition& c, const Env& env) {
    switch (c.kind) {
      case CK::Test: {
        Arg a = operand(c.lhs, env);
        if (a.kind == Arg::Kind::Absent) return false;
        if (a.kind != Arg::Kind::Scalar || !a.value.is_bool()) {
          throw Error(ErrorKind::Type, "condition " + unparse(c) + " is not a predicate");
        }
        return a.value.as_bool();
      }
      case CK::Compare: return compare(c.op, operand(c.lhs, env), operand(c.rhs, env));
      case CK::Not: return !holds(c.items[0], env);
      case CK::And: return holds(c.items[0], env) && holds(c.items[1], env);
      case CK::Or: return holds(c.items[0], env) || holds(c.items[1], env);
      case CK::ForEach:
      case CK::ForSome: {
        const Term* node = range_node(c.range);
        const MatchResult* arr = env.array(node);
        if (!arr) return false;
        Targets inner;
        gather(c.items[0], node, inner);
        bool all = true, some = false;
        for (const MatchResult& e : arr->items) {
          bool ok = false;
          for (const Env& sub : enumerate(node->elem(), e, inner)) {
            Env merged = env;
            merged.absorb(sub);
            if (holds(c.items[0], merged)) {
              ok = true;
              break;
            }
          }
          all = all && ok;
          some = some || ok;
        }
        return c.kind == CK::ForEach ? all : some;
      }
      case CK::Par:
      case CK::With: break;
    }
    throw Error(ErrorKind::Internal, "compound condition evaluated as a predicate");
  }

 private:
  const Term* range_node(const std::vector<std::string>& vars) {
    const Term* n = array_node(source_, vars);
    if (!n) {
      std::string names;
      for (const auto& v : vars) names += (names.empty() ? "$" : ", $") + v;
      throw Error(ErrorKind::Query, "array term [" + names + "] does not denote an array of the extraction term " +
                                        to_string(source_));
    }
    return n;
  }

  // Targets of c that lie within `scope` (an array node), or all of them when
  // scope is null; quantifier bodies are enumerated per element later, so only
  // their references to variables outside the range are collected here.
  void gather(const Condition& c, const Term* scope, Targets& out) {
    auto in_scope = [&](const Term* n) { return !scope || (n != scope && contains_node(scope->elem(), n)); };
    auto var_in_scope = [&](const std::string& v) { return !scope || var_set(scope->elem()).count(v) != 0; };
    std::function<void(const Operand&)> op = [&](const Operand& o) {
      switch (o.kind) {
        case OK::Variable:
        case OK::Field:
          if (var_in_scope(o.name)) out.vars.insert(o.name);
          return;
        case OK::ArrayTerm: {
          const Term* n = range_node(o.vars);
          if (in_scope(n)) out.arrays.insert(n);
          return;
        }
        case OK::Call:
          for (const Operand& a : o.args) op(a);
          return;
        case OK::Literal: return;
      }
    };
    switch (c.kind) {
      case CK::Test: op(c.lhs); return;
      case CK::Compare:
        op(c.lhs);
        op(c.rhs);
        return;
      case CK::ForEach:
      case CK::ForSome: {
        const Term* n = range_node(c.range);
        if (in_scope(n)) out.arrays.insert(n);
        Targets body;
        gather(c.items[0], nullptr, body);
        auto local = var_set(n->elem());
        for (const auto& v : body.vars) {
          if (!local.count(v) && var_in_scope(v)) out.vars.insert(v);
        }
        for (const Term* a : body.arrays) {
          if (!contains_node(n->elem(), a) && in_scope(a)) out.arrays.insert(a);
        }
        return;
      }
      default:
        for (const Condition& i : c.items) gather(i, scope, out);
        return;
    }
  }

  std::vector<Env> enumerate(const Term& t, const MatchResult& d, const Targets& targets) {
    if (!targets.relevant(t)) return {Env{}};
    if (!d.ok()) return {};
    if (targets.arrays.count(&t)) {
      Env e;
      e.arrays.emplace_back(&t, &d);
      return {e};
    }
    switch (t.kind) {
      case Term::Kind::Var: {
        Env e;
        if (d.kind == MK::Binding) e.vars.emplace_back(t.name, &d.value);
        return {e};
      }
      case Term::Kind::Tuple: {
        if (d.kind != MK::Tuple || d.items.size() != t.items.size()) {
          throw Error(ErrorKind::Internal, "result " + render(d) + " does not follow " + to_string(t));
        }
        std::vector<Env> acc{Env{}};
        for (std::size_t i = 0; i < t.items.size(); ++i) {
          std::vector<Env> part = enumerate(t.items[i], d.items[i], targets);
          std::vector<Env> next;
          for (const Env& a : acc) {
            for (const Env& b : part) {
              Env e = a;
              e.absorb(b);
              next.push_back(std::move(e));
            }
          }
          acc = std::move(next);
        }
        return acc;
      }
      case Term::Kind::Option: {
        std::vector<Env> out;
        for (std::size_t i = 0; i < t.items.size() && i < d.items.size(); ++i) {
          if (!d.items[i].ok()) continue;
          for (Env& e : enumerate(t.items[i], d.items[i], targets)) {
            e.tags.insert(e.tags.end(), d.tags[i].begin(), d.tags[i].end());
            out.push_back(std::move(e));
          }
        }
        return out;
      }
      case Term::Kind::Array: {
        std::vector<Env> out;
        if (!d.is_array()) return out;
        for (std::size_t k = 0; k < d.items.size(); ++k) {
          for (Env& e : enumerate(t.elem(), d.items[k], targets)) {
            e.tags.insert(e.tags.end(), d.tags[k].begin(), d.tags[k].end());
            out.push_back(std::move(e));
          }
        }
        return out;
      }
      case Term::Kind::Distinct: return enumerate(t.elem(), d, targets);
    }
    return {};
  }

  Arg operand(const Operand& o, const Env& env) {
    switch (o.kind) {
      case OK::Literal: return Arg::scalar(o.literal);
      case OK::Variable: {
        const Value* v = env.var(o.name);
        return v ? Arg::scalar(*v) : Arg::absent();
      }
      case OK::Field: {
        const Value* v = env.var(o.name);
        if (!v) return Arg::absent();
        Value cur = *v;
        for (const auto& f : o.fields) {
          auto next = get_field(cur, f);
          if (!next) return Arg::absent();
          cur = std::move(*next);
        }
        return Arg::scalar(std::move(cur));
      }
      case OK::ArrayTerm: {
        const MatchResult* a = env.array(range_node(o.vars));
        return a ? Arg::array(a->items.size()) : Arg::absent();
      }
      case OK::Call: {
        std::vector<Arg> args;
        for (const Operand& a : o.args) args.push_back(operand(a, env));
        return Arg::scalar(eval_builtin(o.name, args));
      }
    }
    return Arg::absent();
  }

  const Term& source_;
};

struct Outcome {
  JoinConstraint jc;
  bool root_only = false;  // some support involved no array element or option branch
};

Outcome evaluate(const Condition& c, const MatchResult& data, const Term& source) {
  Evaluator ev(source);
  Outcome out;
  std::set<TagSet> allowed;
  for (Env& e : ev.supports(c, data)) {
    std::sort(e.tags.begin(), e.tags.end());
    e.tags.erase(std::unique(e.tags.begin(), e.tags.end()), e.tags.end());
    if (e.tags.empty()) out.root_only = true;
    out.jc.domain.insert(e.tags.begin(), e.tags.end());
    if (ev.holds(c, e)) allowed.insert(e.tags);
  }
  out.jc.allowed.assign(allowed.begin(), allowed.end());
  return out;
}

bool dead(const TagSet& tags, const std::set<Tag>& dead_tags) {
  return std::any_of(tags.begin(), tags.end(), [&](Tag t) { return dead_tags.count(t) != 0; });
}

void prune(MatchResult& d, const std::set<Tag>& dead_tags) {
  switch (d.kind) {
    case MK::Tuple:
      for (auto& i : d.items) {
        prune(i, dead_tags);
        if (!i.ok()) {
          d = MatchResult::failed();
          return;
        }
      }
      return;
    case MK::Array: {
      std::vector<MatchResult> items;
      std::vector<TagSet> tags;
      for (std::size_t k = 0; k < d.items.size(); ++k) {
        if (dead(d.tags[k], dead_tags)) continue;
        prune(d.items[k], dead_tags);
        if (!d.items[k].ok()) continue;
        items.push_back(std::move(d.items[k]));
        tags.push_back(std::move(d.tags[k]));
      }
      d.items = std::move(items);
      d.tags = std::move(tags);
      return;
    }
    case MK::Option: {
      bool any = false;
      for (std::size_t i = 0; i < d.items.size(); ++i) {
        MatchResult& b = d.items[i];
        if (!b.ok()) continue;
        if (dead(d.tags[i], dead_tags)) {
          b = MatchResult::failed();
          continue;
        }
        bool had = b.is_array() && !b.items.empty();
        prune(b, dead_tags);
        // A branch whose array filtering emptied is no longer a valid result.
        if (had && b.items.empty()) b = MatchResult::failed();
        any = any || b.ok();
      }
      if (!any) d = MatchResult::failed();
      return;
    }
    default: return;
  }
}

void apply(const Condition& c, const Term& source, Filtered& f) {
  if (!f.result.ok()) return;
  if (c.kind == CK::With) {
    apply(c.items[0], source, f);
    apply(c.items[1], source, f);
    return;
  }
  Outcome o;
  if (c.kind == CK::Par) {
    std::vector<const Condition*> parts;
    std::function<void(const Condition&)> collect = [&](const Condition& x) {
      if (x.kind == CK::Par) {
        for (const Condition& i : x.items) collect(i);
      } else {
        parts.push_back(&x);
      }
    };
    collect(c);
    std::set<TagSet> allowed;
    for (const Condition* p : parts) {
      Outcome po = evaluate(*p, f.result, source);
      o.jc.domain.insert(po.jc.domain.begin(), po.jc.domain.end());
      allowed.insert(po.jc.allowed.begin(), po.jc.allowed.end());
      o.root_only = o.root_only || po.root_only;
    }
    o.jc.allowed.assign(allowed.begin(), allowed.end());
  } else {
    o = evaluate(c, f.result, source);
  }
  if (o.jc.allowed.empty() && o.root_only) {
    f.result = MatchResult::failed();
    return;
  }
  std::set<Tag> live;
  for (const TagSet& s : o.jc.allowed) live.insert(s.begin(), s.end());
  std::set<Tag> dead_tags;
  for (Tag t : o.jc.domain) {
    if (!live.count(t)) dead_tags.insert(t);
  }
  prune(f.result, dead_tags);
  f.joins.push_back(std::move(o.jc));
}

}  // namespace

Filtered filter(const MatchResult& r, const Term& source, const Condition& c) {
  validate_condition(c, source);
  Filtered f{r, {}};
  apply(c, source, f);
  return f;
}

MatchResult resolve_options(const MatchResult& r) {
  switch (r.kind) {
    case MK::Tuple: {
      MatchResult out = r;
      for (auto& i : out.items) {
        i = resolve_options(i);
        if (!i.ok()) return MatchResult::failed();
      }
      return out;
    }
    case MK::Array: {
      MatchResult out = MatchResult::array({}, {});
      for (std::size_t k = 0; k < r.items.size(); ++k) {
        MatchResult e = resolve_options(r.items[k]);
        if (!e.ok()) continue;
        out.items.push_back(std::move(e));
        out.tags.push_back(r.tags[k]);
      }
      return out;
    }
    case MK::Option: {
      MatchResult out = r;
      out.selected = -1;
      for (std::size_t i = 0; i < out.items.size(); ++i) {
        out.items[i] = resolve_options(out.items[i]);
        if (out.selected < 0 && out.items[i].ok()) out.selected = static_cast<int>(i);
      }
      if (out.selected < 0) return MatchResult::failed();
      return out;
    }
    default: return r;
  }
}

}  // namespace jpq
