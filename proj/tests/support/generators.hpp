// Random generators for property tests. Everything is driven by an explicit
// std::mt19937 so failures reproduce from the seed.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "jpq/ast.hpp"
#include "jpq/matcher.hpp"
#include "jpq/term.hpp"
#include "jpq/value.hpp"

namespace gen {

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline std::string text(Rng& rng, int max_len = 6) {
  static const std::vector<std::string> pieces = {"a", "b", "Z", "0", " ", "-", "_", "\"", "\\", "/", "\n",
                                                  "\t", "\xC3\xA9", "\xE4\xB8\xAD", "\xF0\x9F\x98\x80", "x"};
  std::string s;
  int n = pick(rng, 0, max_len);
  for (int i = 0; i < n; ++i) s += pieces[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(pieces.size()) - 1))];
  return s;
}

inline jpq::Value number(Rng& rng) {
  switch (pick(rng, 0, 3)) {
    case 0: return jpq::Value(pick(rng, -1000, 1000));
    case 1: return jpq::Value(std::uniform_real_distribution<double>(-1e6, 1e6)(rng));
    case 2: return jpq::Value(pick(rng, -50, 50) / 8.0);
    default: return jpq::Value(std::ldexp(static_cast<double>(pick(rng, 1, 1 << 20)), pick(rng, -60, 60)));
  }
}

inline jpq::Value atom(Rng& rng) {
  switch (pick(rng, 0, 3)) {
    case 0: return jpq::Value();
    case 1: return jpq::Value(coin(rng));
    case 2: return number(rng);
    default: return jpq::Value(text(rng));
  }
}

inline jpq::Value value(Rng& rng, int depth = 3) {
  int k = depth <= 0 ? 0 : pick(rng, 0, 4);
  if (k <= 1) return atom(rng);
  if (k == 2) {
    jpq::Array a;
    int n = pick(rng, 0, 4);
    for (int i = 0; i < n; ++i) a.push_back(value(rng, depth - 1));
    return jpq::Value(std::move(a));
  }
  jpq::Object o;
  std::set<std::string> keys;
  int n = pick(rng, 0, 4);
  for (int i = 0; i < n; ++i) {
    std::string key = text(rng, 4);
    if (!keys.insert(key).second) continue;
    o.emplace_back(key, value(rng, depth - 1));
  }
  return jpq::Value(std::move(o));
}

// Documents with a small key vocabulary so that patterns hit often.
inline jpq::Value document(Rng& rng, int depth = 4) {
  static const std::vector<std::string> keys = {"ID", "name", "items", "sub", "tag"};
  int k = depth <= 0 ? 0 : pick(rng, 0, 5);
  if (k <= 1) {
    if (coin(rng)) return jpq::Value(std::string(1, static_cast<char>('a' + pick(rng, 0, 3))));
    return jpq::Value(pick(rng, 0, 9));
  }
  if (k == 2) {
    jpq::Array a;
    int n = pick(rng, 0, 3);
    for (int i = 0; i < n; ++i) a.push_back(document(rng, depth - 1));
    return jpq::Value(std::move(a));
  }
  jpq::Object o;
  for (const auto& key : keys) {
    if (coin(rng, 0.45)) o.emplace_back(key, document(rng, depth - 1));
  }
  return jpq::Value(std::move(o));
}

/// Fresh variable names v0, v1, ...
struct Names {
  int next = 0;
  std::vector<std::string> bound;
  std::string fresh() {
    bound.push_back("v" + std::to_string(next++));
    return bound.back();
  }
};

inline jpq::ValuePredicate predicate(Rng& rng) {
  jpq::ValuePredicate p;
  if (coin(rng)) {
    p.kind = jpq::ValuePredicate::Kind::String;
    p.text.pattern = text(rng, 3) + (coin(rng) ? "?" : "");
    return p;
  }
  p.kind = jpq::ValuePredicate::Kind::Compare;
  p.op = static_cast<jpq::CompareOp>(pick(rng, 0, 5));
  p.literal = coin(rng) ? atom(rng) : jpq::Value(text(rng, 3));
  return p;
}

jpq::ValuePattern pattern(Rng& rng, Names& names, int depth);

inline jpq::KeyValuePattern key_pattern(Rng& rng, Names& names, int depth) {
  jpq::KeyValuePattern k;
  if (depth > 0 && coin(rng, 0.15)) {
    k.kind = jpq::KeyValuePattern::Kind::Option;
    int n = pick(rng, 2, 3);
    for (int i = 0; i < n; ++i) k.alternatives.push_back(key_pattern(rng, names, depth - 1));
    return k;
  }
  switch (pick(rng, 0, 3)) {
    case 0: k.key_var = names.fresh(); break;
    case 1: k.key_pred = jpq::StringPredicate{text(rng, 3) + (coin(rng) ? "?" : "")}; break;
    case 2:
      k.key_var = names.fresh();
      k.key_pred = jpq::StringPredicate{"?" + text(rng, 2)};
      break;
    default: break;
  }
  k.value.push_back(pattern(rng, names, depth - 1));
  return k;
}

inline jpq::ValuePattern pattern(Rng& rng, Names& names, int depth) {
  using K = jpq::ValuePattern::Kind;
  jpq::ValuePattern p;
  int k = depth <= 0 ? pick(rng, 0, 2) : pick(rng, 0, 8);
  switch (k) {
    case 0: p.kind = K::Variable; p.var = names.fresh(); break;
    case 1: p.kind = K::Predicate; p.pred = predicate(rng); break;
    case 2: p.kind = K::Wildcard; break;
    case 3: {
      p.kind = K::Object;
      int n = pick(rng, 0, 3);
      for (int i = 0; i < n; ++i) p.keys.push_back(key_pattern(rng, names, depth - 1));
      break;
    }
    case 4: p.kind = K::Array; p.items.push_back(pattern(rng, names, depth - 1)); break;
    case 5:
    case 6: {
      p.kind = k == 5 ? K::Conjunction : K::Option;
      int n = pick(rng, 2, 3);
      for (int i = 0; i < n; ++i) p.items.push_back(pattern(rng, names, depth - 1));
      break;
    }
    case 7: p.kind = K::Children; p.keys.push_back(key_pattern(rng, names, depth - 1)); break;
    default: p.kind = K::Descendants; p.items.push_back(pattern(rng, names, depth - 1)); break;
  }
  return p;
}

/// A pattern shaped after v, so that matching mostly succeeds.
inline jpq::ValuePattern pattern_for(Rng& rng, const jpq::Value& v, Names& names, int depth) {
  using K = jpq::ValuePattern::Kind;
  jpq::ValuePattern p;
  int roll = pick(rng, 0, 9);
  if (depth <= 0 || roll == 0) {
    p.kind = K::Variable;
    p.var = names.fresh();
    return p;
  }
  if (roll == 1) return pattern(rng, names, 1);
  if (roll == 2) {
    p.kind = K::Option;
    p.items.push_back(pattern(rng, names, 1));
    p.items.push_back(pattern_for(rng, v, names, depth - 1));
    return p;
  }
  if (roll == 3) {
    p.kind = K::Conjunction;
    p.items.push_back(pattern_for(rng, v, names, depth - 1));
    p.items.push_back(pattern_for(rng, v, names, depth - 1));
    return p;
  }
  if (roll == 4) {
    p.kind = K::Descendants;
    p.items.push_back(pattern(rng, names, 1));
    return p;
  }
  if (v.is_object()) {
    if (roll == 5) {
      p.kind = K::Children;
      jpq::KeyValuePattern kp;
      kp.key_var = names.fresh();
      kp.value.push_back(pattern(rng, names, 1));
      p.keys.push_back(std::move(kp));
      return p;
    }
    p.kind = K::Object;
    for (const auto& [key, val] : v.as_object()) {
      if (!coin(rng, 0.6)) continue;
      jpq::KeyValuePattern kp;
      kp.key_pred = jpq::StringPredicate{key};
      if (key.find('?') != std::string::npos) kp.key_pred->pattern = "?";
      if (coin(rng, 0.2)) kp.key_var = names.fresh();
      kp.value.push_back(pattern_for(rng, val, names, depth - 1));
      p.keys.push_back(std::move(kp));
    }
    return p;
  }
  if (v.is_array()) {
    p.kind = K::Array;
    const jpq::Array& a = v.as_array();
    p.items.push_back(a.empty() ? pattern(rng, names, 1) : pattern_for(rng, a.front(), names, depth - 1));
    return p;
  }
  p.kind = K::Predicate;
  p.pred.kind = jpq::ValuePredicate::Kind::Compare;
  p.pred.op = coin(rng) ? jpq::CompareOp::Eq : jpq::CompareOp::Ne;
  p.pred.literal = v;
  return p;
}

inline jpq::ConstructionPattern construction(Rng& rng, const std::vector<std::string>& vars, int depth) {
  using K = jpq::ConstructionPattern::Kind;
  jpq::ConstructionPattern cp;
  int k = depth <= 0 ? pick(rng, 0, 1) : pick(rng, 0, 7);
  if (k == 1 && vars.empty()) k = 0;
  switch (k) {
    case 0: cp.literal = coin(rng) ? atom(rng) : jpq::Value(text(rng, 3)); break;
    case 1:
      cp.kind = K::Variable;
      cp.name = vars[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(vars.size()) - 1))];
      break;
    case 2: {
      cp.kind = K::Object;
      int n = pick(rng, 0, 3);
      for (int i = 0; i < n; ++i) {
        cp.keys.push_back("k" + std::to_string(i) + text(rng, 2));
        cp.items.push_back(construction(rng, vars, depth - 1));
      }
      break;
    }
    case 3:
      cp.kind = K::Array;
      cp.items.push_back(construction(rng, vars, depth - 1));
      if (coin(rng, 0.3)) cp.group.push_back(construction(rng, vars, depth - 1));
      if (coin(rng, 0.2)) cp.order_by.push_back(construction(rng, vars, depth - 1));
      cp.order = static_cast<jpq::ConstructionPattern::Order>(pick(rng, 0, 2));
      break;
    case 4: cp.kind = K::Flattened; cp.items.push_back(construction(rng, vars, depth - 1)); break;
    case 5: {
      cp.kind = K::Option;
      int n = pick(rng, 2, 3);
      for (int i = 0; i < n; ++i) cp.items.push_back(construction(rng, vars, depth - 1));
      break;
    }
    case 6: {
      cp.kind = K::Call;
      cp.name = coin(rng) ? "count" : "f" + std::to_string(pick(rng, 0, 9));
      int n = pick(rng, 0, 2);
      for (int i = 0; i < n; ++i) cp.items.push_back(construction(rng, vars, depth - 1));
      break;
    }
    default: cp.kind = K::Distinct; cp.items.push_back(construction(rng, vars, depth - 1)); break;
  }
  return cp;
}

inline std::string some_var(Rng& rng, const std::vector<std::string>& vars) {
  return vars[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(vars.size()) - 1))];
}

// Up to n distinct variables in first-pick order.
inline std::vector<std::string> some_vars(Rng& rng, const std::vector<std::string>& vars, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    std::string v = some_var(rng, vars);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

inline jpq::Operand operand(Rng& rng, const std::vector<std::string>& vars, int depth) {
  using K = jpq::Operand::Kind;
  jpq::Operand o;
  int k = depth <= 0 ? pick(rng, 0, 2) : pick(rng, 0, 4);
  switch (k) {
    case 0: o.literal = coin(rng) ? atom(rng) : jpq::Value(text(rng, 3)); break;
    case 1: o.kind = K::Variable; o.name = some_var(rng, vars); break;
    case 2:
      o.kind = K::Field;
      o.name = some_var(rng, vars);
      for (int i = pick(rng, 1, 2); i > 0; --i) o.fields.push_back(text(rng, 3));
      break;
    case 3:
      o.kind = K::ArrayTerm;
      o.vars = some_vars(rng, vars, pick(rng, 1, 2));
      break;
    default:
      o.kind = K::Call;
      o.name = coin(rng) ? "count" : "g" + std::to_string(pick(rng, 0, 9));
      for (int i = pick(rng, 0, 2); i > 0; --i) o.args.push_back(operand(rng, vars, depth - 1));
      break;
  }
  return o;
}

inline jpq::Condition condition(Rng& rng, const std::vector<std::string>& vars, int depth) {
  using K = jpq::Condition::Kind;
  jpq::Condition c;
  int k = depth <= 0 ? pick(rng, 0, 1) : pick(rng, 0, 8);
  switch (k) {
    case 0: {
      c.kind = K::Test;
      c.lhs = operand(rng, vars, 1);
      if (c.lhs.kind != jpq::Operand::Kind::Call) {
        jpq::Operand call;
        call.kind = jpq::Operand::Kind::Call;
        call.name = "notnull";
        call.args.push_back(std::move(c.lhs));
        c.lhs = std::move(call);
      }
      break;
    }
    case 1:
      c.kind = K::Compare;
      c.op = static_cast<jpq::CompareOp>(pick(rng, 0, 5));
      c.lhs = operand(rng, vars, 1);
      c.rhs = operand(rng, vars, 1);
      break;
    case 2: c.kind = K::Not; c.items.push_back(condition(rng, vars, depth - 1)); break;
    case 3:
    case 4:
    case 5:
    case 6:
      c.kind = static_cast<K>(static_cast<int>(K::And) + (k - 3));
      c.items.push_back(condition(rng, vars, depth - 1));
      c.items.push_back(condition(rng, vars, depth - 1));
      break;
    default: {
      c.kind = k == 7 ? K::ForEach : K::ForSome;
      c.bound = some_vars(rng, vars, pick(rng, 1, 2));
      c.range = c.bound;
      for (const auto& v : some_vars(rng, vars, 1)) {
        if (coin(rng, 0.3) && std::find(c.range.begin(), c.range.end(), v) == c.range.end()) c.range.push_back(v);
      }
      c.items.push_back(condition(rng, vars, depth - 1));
      break;
    }
  }
  return c;
}

inline jpq::QueryAst query(Rng& rng) {
  jpq::QueryAst q;
  Names names;
  int n = pick(rng, 1, 2);
  for (int i = 0; i < n; ++i) q.sources.push_back(jpq::Source{"d" + std::to_string(i), pattern(rng, names, 3)});
  q.construct = construction(rng, names.bound, 3);
  if (!names.bound.empty() && coin(rng, 0.7)) q.where = condition(rng, names.bound, 3);
  return q;
}

// ---------------------------------------------------------------------------
// matching terms and conforming results

inline jpq::Term term(Rng& rng, std::vector<std::string>& pool, int depth) {
  int k = depth <= 0 || pool.size() <= 1 ? 0 : pick(rng, 0, 3);
  if (k == 0 || pool.empty()) {
    if (pool.empty()) return jpq::Term::unit();
    std::string v = pool.back();
    pool.pop_back();
    return jpq::Term::var(v);
  }
  if (k == 3) return jpq::Term::array(term(rng, pool, depth - 1));
  std::vector<jpq::Term> items;
  int n = pick(rng, 2, 3);
  for (int i = 0; i < n && !pool.empty(); ++i) items.push_back(term(rng, pool, depth - 1));
  return k == 1 ? jpq::Term::tuple(std::move(items)) : jpq::Term::option(std::move(items));
}

/// A normalized extraction-like term with depth <= max_depth over `nvars` variables.
inline jpq::Term source_term(Rng& rng, int nvars, int max_depth) {
  std::vector<std::string> pool;
  for (int i = nvars; i > 0; --i) pool.push_back(std::string(1, static_cast<char>('a' + i - 1)));
  std::vector<jpq::Term> parts;
  while (!pool.empty()) parts.push_back(term(rng, pool, max_depth));
  return jpq::Term::tuple(std::move(parts));
}

struct Tagger {
  jpq::Tag next = 1;
};

/// A random result conforming to t. Atoms come from a small pool so that
/// grouping keys collide.
inline jpq::MatchResult result(Rng& rng, const jpq::Term& t, Tagger& tags, int max_len = 3) {
  using K = jpq::Term::Kind;
  jpq::MatchResult r;
  switch (t.kind) {
    case K::Var: {
      static const std::vector<jpq::Value> pool = {jpq::Value(1), jpq::Value(2), jpq::Value("a"), jpq::Value("b")};
      return jpq::MatchResult::binding(t.name, pool[static_cast<std::size_t>(pick(rng, 0, 3))]);
    }
    case K::Tuple:
      if (t.items.empty()) return jpq::MatchResult::unit();
      r.kind = jpq::MatchResult::Kind::Tuple;
      for (const auto& c : t.items) r.items.push_back(result(rng, c, tags, max_len));
      return r;
    case K::Option: {
      r.kind = jpq::MatchResult::Kind::Option;
      int live = pick(rng, 0, static_cast<int>(t.items.size()) - 1);
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        bool ok = static_cast<int>(i) == live || coin(rng, 0.4);
        r.items.push_back(ok ? result(rng, t.items[i], tags, max_len) : jpq::MatchResult::failed());
        r.tags.push_back({tags.next++});
      }
      return r;
    }
    case K::Array: {
      if (t.flattened) return result(rng, t.elem(), tags, max_len);
      std::vector<jpq::MatchResult> elems;
      std::vector<jpq::TagSet> ts;
      int n = pick(rng, 0, max_len);
      for (int i = 0; i < n; ++i) {
        elems.push_back(result(rng, t.elem(), tags, max_len));
        ts.push_back({tags.next++});
      }
      return jpq::MatchResult::array(std::move(elems), std::move(ts));
    }
    case K::Distinct: return result(rng, t.elem(), tags, max_len);
  }
  return r;
}

}  // namespace gen
