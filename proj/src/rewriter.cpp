#include "jpq/rewriter.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

namespace jpq {

std::string_view rule_name(RewriteRule rule) {
  switch (rule) {
    case RewriteRule::TupleCommutation: return "tuple-commutation";
    case RewriteRule::TupleAssociation: return "tuple-association";
    case RewriteRule::OptionCommutation: return "option-commutation";
    case RewriteRule::OptionAssociation: return "option-association";
    case RewriteRule::TupleDuplication: return "tuple-duplication";
    case RewriteRule::ArrayFlattening: return "array-flattening";
    case RewriteRule::OptionTupleDistribution: return "option-tuple-distribution";
    case RewriteRule::ArrayTupleDistribution: return "array-tuple-distribution";
    case RewriteRule::ArrayTplFolding: return "array-tpl-folding";
  }
  return "?";
}

std::string to_string(const RewriteStep& step) {
  std::string s(rule_name(step.rule));
  if (step.inverse) s += "^-1";
  s += " @ " + to_string(step.path);
  switch (step.rule) {
    case RewriteRule::TupleCommutation:
    case RewriteRule::TupleAssociation:
    case RewriteRule::OptionCommutation:
    case RewriteRule::OptionAssociation: s += " #" + std::to_string(step.param); break;
    default: break;
  }
  return s;
}

namespace {

using K = Term::Kind;

Term raw_tuple(std::vector<Term> items) {
  Term t;
  t.items = std::move(items);
  return t;
}

Term raw_option(std::vector<Term> items) {
  Term t;
  t.kind = K::Option;
  t.items = std::move(items);
  return t;
}

[[noreturn]] void inapplicable(RewriteRule rule, const TermPath& path, const std::string& why) {
  throw RuleInapplicable("rule-inapplicable: " + std::string(rule_name(rule)) + " at " + to_string(path) + ": " + why);
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& x : a) {
    if (b.count(x)) return false;
  }
  return true;
}

}  // namespace

bool has_enclosing_array(const Term& root, const TermPath& path) {
  std::vector<const Term*> chain{&root};
  for (int i : path) {
    const Term* cur = chain.back();
    if (cur->kind == K::Var || i < 0 || static_cast<std::size_t>(i) >= cur->items.size()) return false;
    chain.push_back(&cur->items[static_cast<std::size_t>(i)]);
  }
  for (const Term* t : chain) {
    if (t->kind == K::Distinct) return false;
  }
  for (std::size_t k = chain.size() - 1; k-- > 0;) {
    const Term* a = chain[k];
    if (a->kind == K::Array && !a->flattened) return true;
    if (a->kind == K::Tuple || a->kind == K::Option || a->kind == K::Array) continue;
    return false;
  }
  return false;
}

Term apply_rule(RewriteRule rule, const Term& t, const TermPath& path, int param, bool inverse) {
  // Rules never rewrite inside distinct terms: those act as grouping keys.
  {
    const Term* cur = &t;
    for (int i : path) {
      if (cur->kind == K::Var || i < 0 || static_cast<std::size_t>(i) >= cur->items.size()) {
        inapplicable(rule, path, "path does not address a subterm");
      }
      if (cur->kind == K::Distinct) inapplicable(rule, path, "subterm lies inside a distinct term");
      cur = &cur->items[static_cast<std::size_t>(i)];
    }
  }
  Term out = t;
  Term& node = subterm(out, path);
  const int n = static_cast<int>(node.items.size());
  switch (rule) {
    case RewriteRule::TupleCommutation:
    case RewriteRule::OptionCommutation: {
      K want = rule == RewriteRule::TupleCommutation ? K::Tuple : K::Option;
      if (node.kind != want) inapplicable(rule, path, want == K::Tuple ? "not a tuple" : "not an option");
      if (param < 0 || param + 1 >= n) inapplicable(rule, path, "no components at positions " + std::to_string(param) + " and " + std::to_string(param + 1));
      std::swap(node.items[static_cast<std::size_t>(param)], node.items[static_cast<std::size_t>(param) + 1]);
      return out;
    }
    case RewriteRule::TupleAssociation:
    case RewriteRule::OptionAssociation: {
      K want = rule == RewriteRule::TupleAssociation ? K::Tuple : K::Option;
      if (node.kind != want) inapplicable(rule, path, want == K::Tuple ? "not a tuple" : "not an option");
      if (!inverse) {
        if (param < 1 || param > n - 2) inapplicable(rule, path, "split point must leave at least two grouped components");
        std::vector<Term> rest(node.items.begin() + param, node.items.end());
        node.items.erase(node.items.begin() + param, node.items.end());
        Term g;
        g.kind = want;
        g.items = std::move(rest);
        node.items.push_back(std::move(g));
        return out;
      }
      if (param < 0 || param >= n) inapplicable(rule, path, "no component at position " + std::to_string(param));
      Term inner = node.items[static_cast<std::size_t>(param)];
      if (inner.kind != want || inner.items.size() < 2) inapplicable(rule, path, "component is not a nested group");
      node.items.erase(node.items.begin() + param);
      node.items.insert(node.items.begin() + param, inner.items.begin(), inner.items.end());
      return out;
    }
    case RewriteRule::TupleDuplication: {
      Term copy = node;
      node = raw_tuple({copy, copy});
      return out;
    }
    case RewriteRule::ArrayFlattening:
      if (node.kind != K::Array) inapplicable(rule, path, "not an array");
      if (node.flattened) inapplicable(rule, path, "array is already flattened");
      if (!has_enclosing_array(t, path)) inapplicable(rule, path, "array is not an element term of an enclosing array");
      node.flattened = true;
      return out;
    case RewriteRule::OptionTupleDistribution: {
      if (node.kind != K::Tuple || n != 2) inapplicable(rule, path, "not a pair");
      if (node.items[1].kind != K::Option) inapplicable(rule, path, "second component is not an option");
      std::vector<Term> branches;
      for (const Term& b : node.items[1].items) branches.push_back(raw_tuple({node.items[0], b}));
      node = raw_option(std::move(branches));
      return out;
    }
    case RewriteRule::ArrayTupleDistribution: {
      if (node.kind != K::Tuple || n != 2) inapplicable(rule, path, "not a pair");
      const Term& a = node.items[1];
      if (a.kind != K::Array) inapplicable(rule, path, "second component is not an array");
      if (a.flattened) inapplicable(rule, path, "array is flattened");
      if (a.folded()) inapplicable(rule, path, "array is folded");
      if (!disjoint(var_set(node.items[0]), var_set(a.elem()))) {
        inapplicable(rule, path, "variables of the paired term and the array element overlap");
      }
      Term arr = a;
      arr.items[0] = raw_tuple({node.items[0], a.elem()});
      node = std::move(arr);
      return out;
    }
    case RewriteRule::ArrayTplFolding: {
      if (node.kind != K::Array) inapplicable(rule, path, "not an array");
      if (node.flattened) inapplicable(rule, path, "array is flattened");
      const Term& e = node.elem();
      if (e.kind != K::Tuple || e.items.size() != 2) inapplicable(rule, path, "element term is not a pair");
      Term key = Term::distinct(e.items[0]);
      Term cls = node;
      node = Term::array(raw_tuple({std::move(cls), key}), key);
      return out;
    }
  }
  inapplicable(rule, path, "unknown rule");
}

Term apply_step(const RewriteStep& step, const Term& t) {
  return apply_rule(step.rule, t, step.path, step.param, step.inverse);
}

Term replay(const Term& source, const std::vector<RewriteStep>& steps) {
  Term t = source;
  for (const auto& s : steps) t = apply_step(s, t);
  return t;
}

// ---------------------------------------------------------------------------
// covers

namespace {

void tuple_parts(const Term& t, std::vector<const Term*>& out) {
  for (const Term& c : t.items) {
    if (c.kind == K::Tuple) {
      tuple_parts(c, out);
    } else {
      out.push_back(&c);
    }
  }
}

void option_parts(const Term& t, std::vector<const Term*>& out) {
  for (const Term& c : t.items) {
    if (c.kind == K::Option) {
      option_parts(c, out);
    } else {
      out.push_back(&c);
    }
  }
}

bool covers_impl(const Term& r, const Term& t);

bool assign(const std::vector<const Term*>& rs, const std::vector<const Term*>& ts, std::size_t k,
            std::vector<bool>& used, bool bijective) {
  if (k == ts.size()) {
    if (!bijective) return true;
    return std::all_of(used.begin(), used.end(), [](bool b) { return b; });
  }
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (used[i] || !covers_impl(*rs[i], *ts[k])) continue;
    used[i] = true;
    if (assign(rs, ts, k + 1, used, bijective)) return true;
    used[i] = false;
  }
  return false;
}

bool covers_impl(const Term& r, const Term& t) {
  if (t.is_unit()) return true;
  if (t.kind == K::Tuple) {
    std::vector<const Term*> ts, rs;
    tuple_parts(t, ts);
    if (ts.empty()) return true;
    if (ts.size() == 1) return covers_impl(r, *ts.front());
    if (r.kind != K::Tuple) return false;
    tuple_parts(r, rs);
    if (rs.size() < ts.size()) return false;
    std::vector<bool> used(rs.size(), false);
    return assign(rs, ts, 0, used, false);
  }
  if (r.kind == K::Tuple) {
    std::vector<const Term*> rs;
    tuple_parts(r, rs);
    return std::any_of(rs.begin(), rs.end(), [&](const Term* c) { return covers_impl(*c, t); });
  }
  switch (t.kind) {
    case K::Var:
      // A grouping key stands for its variable.
      if (r.kind == K::Distinct) return r.elem().kind == K::Var && r.elem().name == t.name;
      return r.kind == K::Var && r.name == t.name;
    case K::Option: {
      if (r.kind != K::Option) return false;
      std::vector<const Term*> ts, rs;
      option_parts(t, ts);
      option_parts(r, rs);
      if (rs.size() != ts.size()) return false;
      std::vector<bool> used(rs.size(), false);
      return assign(rs, ts, 0, used, true);
    }
    case K::Array:
      if (r.kind != K::Array || r.flattened != t.flattened) return false;
      if (t.index) {
        if (!r.index || canonical(*r.index, false, true) != canonical(*t.index, false, true)) return false;
      }
      return covers_impl(r.elem(), t.elem());
    case K::Distinct:
      return r.kind == K::Distinct && canonical(r.elem(), false, true) == canonical(t.elem(), false, true);
    case K::Tuple: break;
  }
  return false;
}

}  // namespace

bool covers(const Term& r, const Term& target) { return covers_impl(r, target); }

std::vector<int> option_correspondence(const Term& r, const Term& target) {
  std::vector<const Term*> ts, rs;
  option_parts(target, ts);
  option_parts(r, rs);
  std::vector<int> map(rs.size(), -1);
  std::vector<bool> used(ts.size(), false);
  std::function<bool(std::size_t)> go = [&](std::size_t i) {
    if (i == rs.size()) return true;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (used[j] || !covers_impl(*rs[i], *ts[j])) continue;
      used[j] = true;
      map[i] = static_cast<int>(j);
      if (go(i + 1)) return true;
      used[j] = false;
    }
    map[i] = -1;
    return false;
  };
  go(0);
  return map;
}

// ---------------------------------------------------------------------------
// search guidance

namespace {

void fold_keys(const Term& t, std::map<std::string, int>& arrays, std::map<std::string, int>& values) {
  if (t.kind == K::Distinct) {
    ++values[canonical(t.elem(), false, true)];
    return;
  }
  if (t.folded()) ++arrays[canonical(t.index->elem(), false, true)];
  for (const Term& c : t.items) fold_keys(c, arrays, values);
}

}  // namespace

SearchGuide::SearchGuide(const Term& target) {
  count_vars(target, var_counts);
  std::map<std::string, int> arrays, values;
  fold_keys(target, arrays, values);
  for (auto& [k, n] : values) arrays[k] = std::max(arrays[k], n);
  for (auto& [k, n] : arrays) fold_counts.emplace_back(k, n);
}

bool SearchGuide::may_duplicate(const Term& current, const Term& node) const {
  auto vars = var_set(node);
  if (vars.empty()) return false;
  for (const auto& v : vars) {
    int want = 0;
    for (const auto& [name, n] : var_counts) {
      if (name == v) want = n;
    }
    if (count_var(current, v) >= want) return false;
  }
  return true;
}

int folded_count(const Term& t, const std::string& key_canonical) {
  int n = t.folded() && canonical(t.index->elem(), false, true) == key_canonical ? 1 : 0;
  if (t.kind == K::Distinct) return n;
  for (const Term& c : t.items) n += folded_count(c, key_canonical);
  return n;
}

bool SearchGuide::may_fold(const Term& current, const Term& key) const {
  std::string k = canonical(key, false, true);
  for (const auto& [name, n] : fold_counts) {
    if (name == k) return folded_count(current, k) < n;
  }
  return false;
}

// ---------------------------------------------------------------------------
// route inference

namespace {

// Applies concrete steps while recording them, so that every route replays
// rule by rule.
struct Builder {
  Term t;
  std::vector<RewriteStep> steps;

  void step(RewriteRule rule, TermPath path, int param = 0, bool inverse = false) {
    t = apply_rule(rule, t, path, param, inverse);
    steps.push_back(RewriteStep{rule, std::move(path), param, inverse});
  }

  // Reorders the tuple (or option) at `path` so that position k holds original component order[k].
  void permute(const TermPath& path, const std::vector<int>& order,
               RewriteRule comm = RewriteRule::TupleCommutation) {
    std::vector<int> cur(order.size());
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = static_cast<int>(i);
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto pos = static_cast<std::size_t>(std::find(cur.begin(), cur.end(), order[k]) - cur.begin());
      while (pos > k) {
        step(comm, path, static_cast<int>(pos) - 1);
        std::swap(cur[pos - 1], cur[pos]);
        --pos;
      }
    }
  }

  // Splices nested tuple components back into the tuple at `path`.
  void splice_tuple(const TermPath& path, int index) {
    const Term& node = subterm(t, path);
    const Term& c = node.items[static_cast<std::size_t>(index)];
    if (c.kind == K::Tuple && c.items.size() >= 2) step(RewriteRule::TupleAssociation, path, index, true);
  }

  // (X, y) with X standing for k grouped components -> (x1..xk, y...)
  void normalize_pair(const TermPath& path, int k) {
    const Term& tail = subterm(t, path).items[1];
    bool tail_tuple = tail.kind == K::Tuple && tail.items.size() >= 2;
    if (k >= 2) splice_tuple(path, 0);
    if (tail_tuple) splice_tuple(path, k);
  }

  // Nests each block of option branches (given by original position) as its own option.
  void group_options(const TermPath& path, const std::vector<std::vector<int>>& blocks) {
    std::vector<int> ids(subterm(t, path).items.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    for (const auto& block : blocks) {
      if (block.size() < 2) continue;
      std::vector<int> order, kept;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (std::find(block.begin(), block.end(), ids[i]) == block.end()) {
          order.push_back(static_cast<int>(i));
          kept.push_back(ids[i]);
        }
      }
      for (int b : block) order.push_back(static_cast<int>(std::find(ids.begin(), ids.end(), b) - ids.begin()));
      permute(path, order, RewriteRule::OptionCommutation);
      step(RewriteRule::OptionAssociation, path, static_cast<int>(kept.size()));
      kept.push_back(-1);
      ids = std::move(kept);
    }
  }

  void distribute(const TermPath& p, int d, const std::vector<int>& sel, RewriteRule rule,
                  const std::vector<std::vector<int>>& blocks = {}) {
    if (!blocks.empty()) {
      TermPath o = p;
      o.push_back(d);
      group_options(o, blocks);
    }
    const int n = static_cast<int>(subterm(t, p).items.size());
    std::vector<int> order;
    for (int i = 0; i < n; ++i) {
      if (i != d && std::find(sel.begin(), sel.end(), i) == sel.end()) order.push_back(i);
    }
    const int rest = static_cast<int>(order.size());
    order.insert(order.end(), sel.begin(), sel.end());
    order.push_back(d);
    permute(p, order);
    TermPath q = p;
    if (rest > 0) {
      step(RewriteRule::TupleAssociation, p, rest);
      q.push_back(rest);
    }
    const int k = static_cast<int>(sel.size());
    if (k >= 2) {
      std::vector<int> o{k};
      for (int i = 0; i < k; ++i) o.push_back(i);
      permute(q, o);
      step(RewriteRule::TupleAssociation, q, 1);
      step(RewriteRule::TupleCommutation, q, 0);
    }
    step(rule, q);
    if (rule == RewriteRule::ArrayTupleDistribution) {
      TermPath e = q;
      e.push_back(0);
      normalize_pair(e, k);
      return;
    }
    const int branches = static_cast<int>(subterm(t, q).items.size());
    for (int b = 0; b < branches; ++b) {
      TermPath e = q;
      e.push_back(b);
      normalize_pair(e, k);
    }
    if (rest == 0 && !p.empty()) {
      TermPath parent(p.begin(), p.end() - 1);
      if (subterm(t, parent).kind == K::Option) step(RewriteRule::OptionAssociation, parent, p.back(), true);
    }
  }

  void fold(const TermPath& a, const std::vector<int>& keys) {
    TermPath e = a;
    e.push_back(0);
    const int n = static_cast<int>(subterm(t, e).items.size());
    std::vector<int> order;
    for (int i = 0; i < n; ++i) {
      if (std::find(keys.begin(), keys.end(), i) == keys.end()) order.push_back(i);
    }
    const int rest = static_cast<int>(order.size());
    const int k = static_cast<int>(keys.size());
    order.insert(order.end(), keys.begin(), keys.end());
    permute(e, order);
    if (k >= 2) step(RewriteRule::TupleAssociation, e, rest);
    std::vector<int> o{rest};
    for (int i = 0; i < rest; ++i) o.push_back(i);
    permute(e, o);
    if (rest >= 2) step(RewriteRule::TupleAssociation, e, 1);
    step(RewriteRule::ArrayTplFolding, a);
    TermPath c = a;
    c.insert(c.end(), {0, 0, 0});
    splice_tuple(c, 1);
    splice_tuple(c, 0);
  }

  void duplicate(const TermPath& p) {
    step(RewriteRule::TupleDuplication, p);
    if (p.empty()) return;
    TermPath parent(p.begin(), p.end() - 1);
    if (subterm(t, parent).kind == K::Tuple) splice_tuple(parent, p.back());
  }
};

void node_paths(const Term& t, TermPath& cur, std::vector<TermPath>& out) {
  out.push_back(cur);
  if (t.kind == K::Distinct) return;
  for (std::size_t i = 0; i < t.items.size(); ++i) {
    cur.push_back(static_cast<int>(i));
    node_paths(t.items[i], cur, out);
    cur.pop_back();
  }
}

std::vector<TermPath> ordered_paths(const Term& t) {
  std::vector<TermPath> out;
  TermPath cur;
  node_paths(t, cur, out);
  std::stable_sort(out.begin(), out.end(), [](const TermPath& a, const TermPath& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<int> bits(unsigned mask, const std::vector<int>& pool) {
  std::vector<int> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (mask & (1u << i)) out.push_back(pool[i]);
  }
  return out;
}

using Move = std::function<void(Builder&)>;

// Set partitions of m option branches into at least two blocks, one of them
// holding two or more branches. Distributing over such a grouping keeps the
// grouped branches together as a nested option.
std::vector<std::vector<std::vector<int>>> option_groupings(int m) {
  std::vector<std::vector<std::vector<int>>> out;
  if (m < 3 || m > 5) return out;
  std::vector<int> label(static_cast<std::size_t>(m), 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == m) {
      if (used < 2 || used == m) return;
      std::vector<std::vector<int>> blocks(static_cast<std::size_t>(used));
      for (int k = 0; k < m; ++k) blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(k)])].push_back(k);
      out.push_back(std::move(blocks));
      return;
    }
    for (int b = 0; b <= used && b < m; ++b) {
      label[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  rec(0, 0);
  return out;
}

std::vector<Move> macro_moves(const Term& cur, const SearchGuide& guide) {
  std::vector<Move> moves;
  for (const TermPath& p : ordered_paths(cur)) {
    const Term& node = subterm(cur, p);
    if (node.kind != K::Tuple && guide.may_duplicate(cur, node)) {
      moves.push_back([p](Builder& b) { b.duplicate(p); });
    }
    if (node.kind == K::Array && !node.flattened && has_enclosing_array(cur, p)) {
      moves.push_back([p](Builder& b) { b.step(RewriteRule::ArrayFlattening, p); });
    }
    if (node.kind == K::Tuple && node.items.size() >= 2) {
      const int n = static_cast<int>(node.items.size());
      for (RewriteRule rule : {RewriteRule::OptionTupleDistribution, RewriteRule::ArrayTupleDistribution}) {
        for (int d = 0; d < n; ++d) {
          const Term& dt = node.items[static_cast<std::size_t>(d)];
          if (rule == RewriteRule::OptionTupleDistribution && dt.kind != K::Option) continue;
          if (rule == RewriteRule::ArrayTupleDistribution && (dt.kind != K::Array || dt.flattened || dt.folded())) continue;
          std::vector<int> pool;
          for (int i = 0; i < n; ++i) {
            if (i != d) pool.push_back(i);
          }
          for (unsigned mask = 1; mask < (1u << pool.size()); ++mask) {
            std::vector<int> sel = bits(mask, pool);
            if (rule == RewriteRule::ArrayTupleDistribution) {
              auto elem_vars = var_set(dt.elem());
              bool clash = false;
              for (int i : sel) clash = clash || !disjoint(var_set(node.items[static_cast<std::size_t>(i)]), elem_vars);
              if (clash) continue;
            }
            moves.push_back([p, d, sel, rule](Builder& b) { b.distribute(p, d, sel, rule); });
            if (rule == RewriteRule::OptionTupleDistribution) {
              for (auto& blocks : option_groupings(static_cast<int>(dt.items.size()))) {
                moves.push_back([p, d, sel, rule, blocks](Builder& b) { b.distribute(p, d, sel, rule, blocks); });
              }
            }
          }
        }
      }
    }
    if (node.kind == K::Array && !node.flattened && node.elem().kind == K::Tuple && node.elem().items.size() >= 2) {
      const Term& e = node.elem();
      std::vector<int> pool;
      for (std::size_t i = 0; i < e.items.size(); ++i) pool.push_back(static_cast<int>(i));
      for (unsigned mask = 1; mask + 1 < (1u << pool.size()); ++mask) {
        std::vector<int> keys = bits(mask, pool);
        std::vector<Term> parts;
        for (int i : keys) parts.push_back(e.items[static_cast<std::size_t>(i)]);
        Term key = parts.size() == 1 ? parts.front() : raw_tuple(parts);
        if (!guide.may_fold(cur, key)) continue;
        moves.push_back([p, keys](Builder& b) { b.fold(p, keys); });
      }
    }
  }
  return moves;
}

class RouteSearch {
 public:
  RouteSearch(const Term& target, const SearchLimits& limits) : target_(target), guide_(target), limits_(limits) {}

  bool run(const Builder& start, int depth, Builder& found) {
    memo_.clear();
    cutoff_ = false;
    return dfs(start, depth, found);
  }
  bool cutoff() const { return cutoff_; }

 private:
  bool dfs(const Builder& cur, int left, Builder& found) {
    if (++expansions_ > limits_.max_expansions) {
      throw RouteError(RouteError::Reason::SearchBoundExceeded,
                       "search-bound-exceeded: more than " + std::to_string(limits_.max_expansions) +
                           " terms explored while restructuring " + to_string(cur.t));
    }
    if (covers(cur.t, target_)) {
      found = cur;
      return true;
    }
    if (left == 0) {
      cutoff_ = true;
      return false;
    }
    std::string key = canonical(cur.t, true, true);
    auto it = memo_.find(key);
    if (it != memo_.end() && it->second >= left) return false;
    memo_[key] = left;
    for (const Move& m : macro_moves(cur.t, guide_)) {
      Builder next = cur;
      try {
        m(next);
      } catch (const RuleInapplicable&) {
        continue;
      }
      if (dfs(next, left - 1, found)) return true;
    }
    return false;
  }

  const Term& target_;
  SearchGuide guide_;
  SearchLimits limits_;
  std::unordered_map<std::string, int> memo_;
  std::size_t expansions_ = 0;
  bool cutoff_ = false;
};

bool has_distinct(const Term& t) {
  if (t.kind == K::Distinct || t.folded()) return true;
  return std::any_of(t.items.begin(), t.items.end(), has_distinct);
}

}  // namespace

RewriteRoute infer_route(const Term& source, const Term& target, const SearchLimits& limits) {
  auto src_vars = var_set(source);
  for (const auto& v : var_set(target)) {
    if (!src_vars.count(v)) {
      throw RouteError(RouteError::Reason::InvalidConstruction,
                       "invalid-construction: $" + v + " is not bound by the extraction term " + to_string(source));
    }
  }
  RouteSearch search(target, limits);
  Builder start{source, {}};
  for (int d = 0; d <= limits.max_depth; ++d) {
    Builder found;
    if (search.run(start, d, found)) return RewriteRoute{source, found.t, found.steps};
    if (!search.cutoff()) {
      std::string msg = "invalid-construction: no restructuring of " + to_string(source) + " yields the shape " +
                        to_string(target);
      if (!has_distinct(target)) msg += "; arrays nested per distinct value need `groupby`";
      throw RouteError(RouteError::Reason::InvalidConstruction, msg);
    }
  }
  throw RouteError(RouteError::Reason::SearchBoundExceeded,
                   "search-bound-exceeded: no route within " + std::to_string(limits.max_depth) +
                       " restructuring steps from " + to_string(source) + " to " + to_string(target));
}

// ---------------------------------------------------------------------------
// data transformation

bool JoinConstraint::admits(const TagSet& context) const {
  TagSet q;
  for (Tag t : context) {
    if (domain.count(t)) q.push_back(t);
  }
  if (q.empty()) return true;
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  return std::any_of(allowed.begin(), allowed.end(),
                     [&](const TagSet& s) { return std::includes(s.begin(), s.end(), q.begin(), q.end()); });
}

namespace {

using MK = MatchResult::Kind;

[[noreturn]] void shape_mismatch(const Term& t, const MatchResult& d) {
  throw Error(ErrorKind::Construction, "shape-mismatch: result " + render(d) + " is not an instance of " + to_string(t));
}

MatchResult raw_result_tuple(std::vector<MatchResult> items) {
  MatchResult r;
  r.kind = MK::Tuple;
  r.items = std::move(items);
  return r;
}

TagSet join(const TagSet& a, const TagSet& b) {
  TagSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

class StepApplier {
 public:
  StepApplier(const RewriteStep& step, const Term& root, const std::vector<JoinConstraint>& constraints)
      : step_(step), root_(root), constraints_(constraints) {
    if (step.rule == RewriteRule::ArrayFlattening) {
      // Data is expanded at the nearest enclosing array that is not itself flattened.
      for (std::size_t k = step.path.size(); k-- > 0;) {
        const Term& a = subterm(root, TermPath(step.path.begin(), step.path.begin() + static_cast<long>(k)));
        if (a.kind == K::Array && !a.flattened) {
          anchor_.assign(step.path.begin(), step.path.begin() + static_cast<long>(k));
          rel_.assign(step.path.begin() + static_cast<long>(k) + 1, step.path.end());
          break;
        }
      }
    } else {
      anchor_ = step.path;
    }
  }

  void run(MatchResult& d) {
    TagSet ctx;
    descend(root_, d, 0, ctx);
  }

 private:
  bool admitted(const TagSet& ctx) const {
    return std::all_of(constraints_.begin(), constraints_.end(), [&](const JoinConstraint& c) { return c.admits(ctx); });
  }

  void descend(const Term& t, MatchResult& d, std::size_t depth, TagSet& ctx) {
    if (!d.ok()) return;
    if (depth == anchor_.size()) {
      at_node(t, d, ctx);
      return;
    }
    const auto i = static_cast<std::size_t>(anchor_[depth]);
    switch (t.kind) {
      case K::Tuple:
        if (d.kind != MK::Tuple || d.items.size() != t.items.size()) shape_mismatch(t, d);
        descend(t.items[i], d.items[i], depth + 1, ctx);
        return;
      case K::Option: {
        if (!d.is_option() || d.items.size() != t.items.size()) shape_mismatch(t, d);
        std::size_t mark = ctx.size();
        ctx.insert(ctx.end(), d.tags[i].begin(), d.tags[i].end());
        descend(t.items[i], d.items[i], depth + 1, ctx);
        ctx.resize(mark);
        return;
      }
      case K::Array:
        if (t.flattened) {
          descend(t.elem(), d, depth + 1, ctx);
          return;
        }
        if (!d.is_array()) shape_mismatch(t, d);
        for (std::size_t k = 0; k < d.items.size(); ++k) {
          std::size_t mark = ctx.size();
          ctx.insert(ctx.end(), d.tags[k].begin(), d.tags[k].end());
          descend(t.elem(), d.items[k], depth + 1, ctx);
          ctx.resize(mark);
        }
        return;
      case K::Distinct: descend(t.elem(), d, depth + 1, ctx); return;
      case K::Var: shape_mismatch(t, d);
    }
  }

  void at_node(const Term& t, MatchResult& d, const TagSet& ctx) {
    const auto p = static_cast<std::size_t>(step_.param);
    switch (step_.rule) {
      case RewriteRule::TupleCommutation:
        if (d.kind != MK::Tuple || d.items.size() != t.items.size()) shape_mismatch(t, d);
        std::swap(d.items[p], d.items[p + 1]);
        return;
      case RewriteRule::TupleAssociation:
        if (d.kind != MK::Tuple || d.items.size() != t.items.size()) shape_mismatch(t, d);
        if (!step_.inverse) {
          std::vector<MatchResult> rest(d.items.begin() + step_.param, d.items.end());
          d.items.erase(d.items.begin() + step_.param, d.items.end());
          d.items.push_back(raw_result_tuple(std::move(rest)));
        } else {
          MatchResult inner = std::move(d.items[p]);
          if (inner.kind != MK::Tuple) shape_mismatch(t.items[p], inner);
          d.items.erase(d.items.begin() + step_.param);
          d.items.insert(d.items.begin() + step_.param, inner.items.begin(), inner.items.end());
        }
        return;
      case RewriteRule::OptionCommutation:
        if (!d.is_option() || d.items.size() != t.items.size()) shape_mismatch(t, d);
        std::swap(d.items[p], d.items[p + 1]);
        std::swap(d.tags[p], d.tags[p + 1]);
        if (d.selected == step_.param) {
          d.selected = step_.param + 1;
        } else if (d.selected == step_.param + 1) {
          d.selected = step_.param;
        }
        return;
      case RewriteRule::OptionAssociation: {
        if (!d.is_option() || d.items.size() != t.items.size()) shape_mismatch(t, d);
        if (!step_.inverse) {
          MatchResult inner;
          inner.kind = MK::Option;
          inner.items.assign(d.items.begin() + step_.param, d.items.end());
          inner.tags.assign(d.tags.begin() + step_.param, d.tags.end());
          if (d.selected >= step_.param) inner.selected = d.selected - step_.param;
          bool any = std::any_of(inner.items.begin(), inner.items.end(), [](const MatchResult& b) { return b.ok(); });
          d.items.erase(d.items.begin() + step_.param, d.items.end());
          d.tags.erase(d.tags.begin() + step_.param, d.tags.end());
          d.items.push_back(any ? std::move(inner) : MatchResult::failed());
          d.tags.emplace_back();
          if (d.selected > step_.param) d.selected = step_.param;
          return;
        }
        const std::size_t m = t.items[p].items.size();
        MatchResult inner = std::move(d.items[p]);
        TagSet outer_tags = d.tags[p];
        std::vector<MatchResult> items;
        std::vector<TagSet> tags;
        if (inner.ok()) {
          if (!inner.is_option() || inner.items.size() != m) shape_mismatch(t.items[p], inner);
          for (std::size_t j = 0; j < m; ++j) {
            items.push_back(std::move(inner.items[j]));
            tags.push_back(join(outer_tags, inner.tags[j]));
          }
        } else {
          items.resize(m);
          tags.resize(m);
        }
        d.items.erase(d.items.begin() + step_.param);
        d.tags.erase(d.tags.begin() + step_.param);
        d.items.insert(d.items.begin() + step_.param, items.begin(), items.end());
        d.tags.insert(d.tags.begin() + step_.param, tags.begin(), tags.end());
        if (d.selected == step_.param) {
          d.selected = step_.param + std::max(0, inner.ok() ? inner.effective_branch() : 0);
        } else if (d.selected > step_.param) {
          d.selected += static_cast<int>(m) - 1;
        }
        return;
      }
      case RewriteRule::TupleDuplication: {
        MatchResult copy = d;
        d = raw_result_tuple({copy, std::move(copy)});
        return;
      }
      case RewriteRule::OptionTupleDistribution: {
        if (d.kind != MK::Tuple || d.items.size() != 2 || !d.items[1].is_option()) shape_mismatch(t, d);
        MatchResult shared = std::move(d.items[0]);
        MatchResult opt = std::move(d.items[1]);
        for (auto& b : opt.items) {
          if (b.ok()) b = raw_result_tuple({shared, std::move(b)});
        }
        d = std::move(opt);
        return;
      }
      case RewriteRule::ArrayTupleDistribution: {
        if (d.kind != MK::Tuple || d.items.size() != 2 || !d.items[1].is_array()) shape_mismatch(t, d);
        MatchResult lone = std::move(d.items[0]);
        MatchResult arr = std::move(d.items[1]);
        MatchResult out = MatchResult::array({}, {});
        for (std::size_t k = 0; k < arr.items.size(); ++k) {
          if (!admitted(join(ctx, arr.tags[k]))) continue;
          out.items.push_back(raw_result_tuple({lone, std::move(arr.items[k])}));
          out.tags.push_back(std::move(arr.tags[k]));
        }
        d = std::move(out);
        return;
      }
      case RewriteRule::ArrayTplFolding: {
        if (!d.is_array()) shape_mismatch(t, d);
        MatchResult out = MatchResult::array({}, {});
        std::vector<const MatchResult*> keys;
        for (std::size_t k = 0; k < d.items.size(); ++k) {
          const MatchResult& e = d.items[k];
          if (e.kind != MK::Tuple || e.items.size() != 2) shape_mismatch(t.elem(), e);
          std::size_t c = 0;
          while (c < keys.size() && !same_data(*keys[c], e.items[0])) ++c;
          if (c == keys.size()) {
            keys.push_back(&e.items[0]);
            out.items.push_back(raw_result_tuple({MatchResult::array({}, {}), e.items[0]}));
            out.tags.emplace_back();
          }
          MatchResult& cls = out.items[c].items[0];
          cls.items.push_back(e);
          cls.tags.push_back(d.tags[k]);
        }
        d = std::move(out);
        return;
      }
      case RewriteRule::ArrayFlattening: {
        if (!d.is_array()) shape_mismatch(t, d);
        MatchResult out = MatchResult::array({}, {});
        for (std::size_t k = 0; k < d.items.size(); ++k) {
          std::vector<std::pair<MatchResult, TagSet>> parts;
          if (!expand(t.elem(), d.items[k], 0, parts)) {
            out.items.push_back(std::move(d.items[k]));
            out.tags.push_back(std::move(d.tags[k]));
            continue;
          }
          for (auto& [x, tg] : parts) {
            TagSet tags = join(d.tags[k], tg);
            if (!admitted(join(ctx, tags))) continue;
            out.items.push_back(std::move(x));
            out.tags.push_back(std::move(tags));
          }
        }
        d = std::move(out);
        return;
      }
    }
  }

  // Releases the elements of the array at rel_ inside one element of the
  // anchor array. Returns false when the element does not reach that array
  // (another option branch is in effect).
  bool expand(const Term& t, const MatchResult& d, std::size_t pos, std::vector<std::pair<MatchResult, TagSet>>& out) {
    if (pos == rel_.size()) {
      if (!d.is_array()) shape_mismatch(t, d);
      for (std::size_t k = 0; k < d.items.size(); ++k) out.emplace_back(d.items[k], d.tags[k]);
      return true;
    }
    const auto i = static_cast<std::size_t>(rel_[pos]);
    std::vector<std::pair<MatchResult, TagSet>> sub;
    TagSet extra;
    switch (t.kind) {
      case K::Tuple:
        if (d.kind != MK::Tuple || d.items.size() != t.items.size()) shape_mismatch(t, d);
        if (!expand(t.items[i], d.items[i], pos + 1, sub)) return false;
        break;
      case K::Option:
        if (!d.is_option() || d.items.size() != t.items.size()) shape_mismatch(t, d);
        if (d.effective_branch() != static_cast<int>(i)) {
          // The branch is not in effect; its data can no longer follow the term.
          MatchResult copy = d;
          copy.items[i] = MatchResult::failed();
          out.emplace_back(std::move(copy), TagSet{});
          return true;
        }
        if (!expand(t.items[i], d.items[i], pos + 1, sub)) return false;
        extra = d.tags[i];
        break;
      case K::Array:
        if (!t.flattened) shape_mismatch(t, d);
        return expand(t.elem(), d, pos + 1, out);
      default: shape_mismatch(t, d);
    }
    for (auto& [x, tg] : sub) {
      MatchResult copy = d;
      copy.items[i] = std::move(x);
      out.emplace_back(std::move(copy), join(extra, tg));
    }
    return true;
  }

  const RewriteStep& step_;
  const Term& root_;
  const std::vector<JoinConstraint>& constraints_;
  TermPath anchor_;
  TermPath rel_;
};

}  // namespace

MatchResult transform_step(const MatchResult& r, const Term& before, const RewriteStep& step,
                           const std::vector<JoinConstraint>& constraints) {
  MatchResult out = r;
  StepApplier(step, before, constraints).run(out);
  return out;
}

MatchResult transform(const MatchResult& r, const RewriteRoute& route, const std::vector<JoinConstraint>& constraints) {
  if (!r.ok()) return r;
  if (!instantiates(r, route.source)) {
    throw Error(ErrorKind::Construction,
                "shape-mismatch: result " + render(r) + " is not an instance of " + to_string(route.source));
  }
  MatchResult cur = r;
  Term t = route.source;
  for (const auto& step : route.steps) {
    cur = transform_step(cur, t, step, constraints);
    t = apply_step(step, t);
  }
  return cur;
}

std::string explain(const RewriteRoute& route) {
  std::string out;
  Term t = route.source;
  for (const auto& step : route.steps) {
    t = apply_step(step, t);
    out += to_string(step) + "  =>  " + to_string(t) + "\n";
  }
  return out;
}

}  // namespace jpq
