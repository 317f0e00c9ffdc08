#include "jpq/constructor.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "jpq/filter.hpp"

namespace jpq {

using CPK = ConstructionPattern::Kind;
using K = Term::Kind;

Term backbone(const ConstructionPattern& cp) {
  switch (cp.kind) {
    case CPK::Literal: return Term::unit();
    case CPK::Variable: return Term::var(cp.name);
    case CPK::Object:
    case CPK::Call: {
      std::vector<Term> items;
      for (const auto& i : cp.items) items.push_back(backbone(i));
      return Term::tuple(std::move(items));
    }
    case CPK::Array:
      if (!cp.group.empty()) return Term::array(backbone(cp.items[0]), backbone(cp.group[0]));
      return Term::array_unindexed(backbone(cp.items[0]));
    case CPK::Flattened: return Term::array_unindexed(backbone(cp.items[0]), true);
    case CPK::Option: {
      std::vector<Term> items;
      for (const auto& i : cp.items) items.push_back(backbone(i));
      return Term::option(std::move(items));
    }
    case CPK::Distinct: return Term::distinct(backbone(cp.items[0]));
  }
  return Term::unit();
}

RewriteRoute validate_and_plan(const Term& extraction, const ConstructionPattern& cp) {
  return infer_route(extraction, backbone(cp));
}

namespace {

struct Frame {
  const Term* term;
  const MatchResult* data;
  const Frame* parent;
};

struct Found {
  const Term* term = nullptr;
  const MatchResult* data = nullptr;
  const Frame* frame = nullptr;
};

using Pred = std::function<bool(const Term&)>;

[[noreturn]] void mismatch(const std::string& what) { throw Error(ErrorKind::Construction, "shape-mismatch: " + what); }

// Searches the part of a result that belongs to one element: tuple components,
// the option branch in effect, flattened arrays and, for variables, grouping keys.
bool find_in(const Term& t, const MatchResult& d, const Pred& pred, bool enter_distinct, Found& out) {
  if (pred(t)) {
    out.term = &t;
    out.data = &d;
    return true;
  }
  if (!d.ok()) return false;
  switch (t.kind) {
    case K::Tuple:
      if (t.items.empty()) return false;
      if (d.kind != MatchResult::Kind::Tuple || d.items.size() != t.items.size()) {
        mismatch("result " + render(d) + " does not follow " + to_string(t));
      }
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (find_in(t.items[i], d.items[i], pred, enter_distinct, out)) return true;
      }
      return false;
    case K::Option: {
      int b = d.effective_branch();
      if (b < 0) return false;
      return find_in(t.items[static_cast<std::size_t>(b)], d.items[static_cast<std::size_t>(b)], pred, enter_distinct, out);
    }
    case K::Array: return t.flattened && find_in(t.elem(), d, pred, enter_distinct, out);
    case K::Distinct: return enter_distinct && find_in(t.elem(), d, pred, enter_distinct, out);
    case K::Var: return false;
  }
  return false;
}

Found lookup(const Frame& frame, const Pred& pred, bool enter_distinct = false) {
  for (const Frame* f = &frame; f; f = f->parent) {
    Found out;
    if (find_in(*f->term, *f->data, pred, enter_distinct, out)) {
      out.frame = f;
      return out;
    }
  }
  return Found{};
}

int order_compare(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) return a.as_number() < b.as_number() ? -1 : (a.as_number() > b.as_number() ? 1 : 0);
  if (a.is_string() && b.is_string()) return a.as_string().compare(b.as_string());
  if (a == b) return 0;
  throw Error(ErrorKind::Type, "cannot order " + serialize(a) + " against " + serialize(b));
}

class Builder {
 public:
  Value build(const ConstructionPattern& cp, const Frame& f) {
    switch (cp.kind) {
      case CPK::Literal: return cp.literal;
      case CPK::Variable: {
        const std::string& name = cp.name;
        Found hit = lookup(f, [&](const Term& t) { return t.kind == K::Var && t.name == name; }, true);
        if (!hit.term) mismatch("$" + name + " is not available at this point of the construction");
        if (hit.data->kind != MatchResult::Kind::Binding) mismatch("$" + name + " is bound to " + render(*hit.data));
        return hit.data->value;
      }
      case CPK::Object: {
        Object obj;
        for (std::size_t i = 0; i < cp.items.size(); ++i) {
          const std::string& key = cp.keys[i];
          if (std::any_of(obj.begin(), obj.end(), [&](const Member& m) { return m.first == key; })) {
            throw Error(ErrorKind::Construction, "duplicate key \"" + key + "\" in constructed object");
          }
          obj.emplace_back(key, build(cp.items[i], f));
        }
        return Value(std::move(obj));
      }
      case CPK::Call: {
        std::vector<Arg> args;
        for (const auto& a : cp.items) args.push_back(Arg::scalar(build(a, f)));
        return eval_builtin(cp.name, args);
      }
      case CPK::Array: return build_array(cp, f);
      case CPK::Flattened: {
        const Term& want = shape(cp);
        Found hit = lookup(f, [&](const Term& t) { return t.kind == K::Array && t.flattened && covers(t, want); });
        if (!hit.term) mismatch("no flattened array of shape " + to_string(want) + " here");
        Frame inner{&hit.term->elem(), hit.data, hit.frame};
        return build(cp.items[0], inner);
      }
      case CPK::Option: {
        const Term& want = shape(cp);
        Found hit = lookup(f, [&](const Term& t) { return t.kind == K::Option && covers(t, want); });
        if (!hit.term) mismatch("no option of shape " + to_string(want) + " here");
        int b = hit.data->effective_branch();
        if (b < 0) return Value();
        std::vector<int> map = option_correspondence(*hit.term, want);
        int target = map[static_cast<std::size_t>(b)];
        if (target < 0 || static_cast<std::size_t>(target) >= cp.items.size()) {
          mismatch("option branch " + std::to_string(b) + " of " + to_string(*hit.term) + " has no construction");
        }
        Frame inner{&hit.term->items[static_cast<std::size_t>(b)], &hit.data->items[static_cast<std::size_t>(b)], hit.frame};
        return build(cp.items[static_cast<std::size_t>(target)], inner);
      }
      case CPK::Distinct: {
        std::string key = canonical(shape(cp).elem(), false, true);
        Found hit = lookup(f, [&](const Term& t) { return t.kind == K::Distinct && canonical(t.elem(), false, true) == key; });
        if (!hit.term) mismatch("no grouping key " + to_string(shape(cp)) + " here; add a groupby");
        Frame inner{&hit.term->elem(), hit.data, hit.frame};
        return build(cp.items[0], inner);
      }
    }
    return Value();
  }

 private:
  const Term& shape(const ConstructionPattern& cp) {
    auto it = shapes_.find(&cp);
    if (it == shapes_.end()) it = shapes_.emplace(&cp, backbone(cp)).first;
    return it->second;
  }

  Value build_array(const ConstructionPattern& cp, const Frame& f) {
    const Term& want = shape(cp);
    Found hit = lookup(f, [&](const Term& t) { return t.kind == K::Array && !t.flattened && covers(t, want); });
    if (!hit.term) mismatch("no array of shape " + to_string(want) + " here");
    if (!hit.data->is_array()) mismatch("result " + render(*hit.data) + " is not an array");
    struct Item {
      Value value;
      Value key;
    };
    std::vector<Item> items;
    const ConstructionPattern* key_cp = nullptr;
    if (cp.order != ConstructionPattern::Order::None) {
      key_cp = !cp.order_by.empty() ? &cp.order_by[0] : (!cp.group.empty() ? &cp.group[0] : &cp.items[0]);
    }
    for (const MatchResult& e : hit.data->items) {
      if (!e.ok()) continue;
      Frame inner{&hit.term->elem(), &e, hit.frame};
      Item it{build(cp.items[0], inner), Value()};
      if (key_cp) it.key = key_cp == &cp.items[0] ? it.value : build(*key_cp, inner);
      items.push_back(std::move(it));
    }
    if (key_cp) {
      bool desc = cp.order == ConstructionPattern::Order::Desc;
      std::stable_sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
        int c = order_compare(a.key, b.key);
        return desc ? c > 0 : c < 0;
      });
    }
    Array out;
    for (auto& it : items) out.push_back(std::move(it.value));
    return Value(std::move(out));
  }

  std::map<const ConstructionPattern*, Term> shapes_;
};

}  // namespace

Value build(const ConstructionPattern& cp, const Term& term, const MatchResult& r) {
  if (!r.ok()) return Value();
  Frame root{&term, &r, nullptr};
  return Builder().build(cp, root);
}

}  // namespace jpq
