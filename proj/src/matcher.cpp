#include "jpq/matcher.hpp"

namespace jpq {

MatchResult MatchResult::unit() {
  MatchResult r;
  r.kind = Kind::Unit;
  return r;
}

MatchResult MatchResult::binding(std::string var, Value v) {
  MatchResult r;
  r.kind = Kind::Binding;
  r.var = std::move(var);
  r.value = std::move(v);
  return r;
}

MatchResult MatchResult::tuple(std::vector<MatchResult> parts) {
  MatchResult r;
  r.kind = Kind::Tuple;
  for (auto& p : parts) {
    if (!p.ok()) return failed();
    if (p.kind == Kind::Unit) continue;
    if (p.kind == Kind::Tuple) {
      for (auto& c : p.items) r.items.push_back(std::move(c));
    } else {
      r.items.push_back(std::move(p));
    }
  }
  if (r.items.empty()) return unit();
  if (r.items.size() == 1) return std::move(r.items.front());
  return r;
}

MatchResult MatchResult::array(std::vector<MatchResult> elements, std::vector<TagSet> tags) {
  MatchResult r;
  r.kind = Kind::Array;
  r.items = std::move(elements);
  r.tags = std::move(tags);
  r.tags.resize(r.items.size());
  return r;
}

MatchResult MatchResult::option(std::vector<MatchResult> branches, std::vector<TagSet> tags) {
  MatchResult r;
  r.kind = Kind::Option;
  tags.resize(branches.size());
  for (std::size_t i = 0; i < branches.size(); ++i) {
    MatchResult& b = branches[i];
    if (b.kind == Kind::Option) {
      int base = static_cast<int>(r.items.size());
      for (std::size_t j = 0; j < b.items.size(); ++j) {
        r.items.push_back(std::move(b.items[j]));
        TagSet t = tags[i];
        t.insert(t.end(), b.tags[j].begin(), b.tags[j].end());
        r.tags.push_back(std::move(t));
      }
      if (b.selected >= 0) r.selected = base + b.selected;
    } else {
      r.items.push_back(std::move(b));
      r.tags.push_back(std::move(tags[i]));
    }
  }
  return r;
}

int MatchResult::effective_branch() const {
  if (selected >= 0) return selected;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].ok()) return static_cast<int>(i);
  }
  return -1;
}

bool same_data(const MatchResult& a, const MatchResult& b) {
  if (a.kind != b.kind || a.var != b.var || !(a.value == b.value) || a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    if (!same_data(a.items[i], b.items[i])) return false;
  }
  return true;
}

bool operator==(const MatchResult& a, const MatchResult& b) {
  if (a.kind != b.kind || a.var != b.var || !(a.value == b.value) || a.selected != b.selected) return false;
  return a.items == b.items;
}

namespace {

bool binds_nothing(const ValuePattern& p) { return pattern_variables(p).empty(); }
bool binds_nothing(const KeyValuePattern& p) { return pattern_variables(p).empty(); }

}  // namespace

MatchResult Matcher::make_option(std::vector<MatchResult> branches) {
  bool any = false;
  for (const auto& b : branches) any = any || b.ok();
  if (!any) return MatchResult::failed();
  std::vector<TagSet> tags;
  for (std::size_t i = 0; i < branches.size(); ++i) tags.push_back({next_tag()});
  return MatchResult::option(std::move(branches), std::move(tags));
}

MatchResult Matcher::value(const ValuePattern& p, const Value& v) {
  using K = ValuePattern::Kind;
  switch (p.kind) {
    case K::Variable: return MatchResult::binding(p.var, v);
    case K::Predicate: return p.pred.matches(v) ? MatchResult::unit() : MatchResult::failed();
    case K::Wildcard: return MatchResult::unit();
    case K::Object: {
      if (!v.is_object()) return MatchResult::failed();
      std::vector<MatchResult> parts;
      for (const auto& k : p.keys) {
        parts.push_back(in_object(k, v));
        if (!parts.back().ok()) return MatchResult::failed();
      }
      return MatchResult::tuple(std::move(parts));
    }
    case K::Array: {
      if (!v.is_array()) return MatchResult::failed();
      if (binds_nothing(p)) return MatchResult::unit();
      std::vector<MatchResult> elems;
      std::vector<TagSet> tags;
      for (const Value& e : v.as_array()) {
        MatchResult r = value(p.items.front(), e);
        if (!r.ok()) continue;
        elems.push_back(std::move(r));
        tags.push_back({next_tag()});
      }
      return MatchResult::array(std::move(elems), std::move(tags));
    }
    case K::Conjunction: {
      std::vector<MatchResult> parts;
      for (const auto& i : p.items) {
        parts.push_back(value(i, v));
        if (!parts.back().ok()) return MatchResult::failed();
      }
      return MatchResult::tuple(std::move(parts));
    }
    case K::Option: {
      std::vector<MatchResult> branches;
      for (const auto& i : p.items) branches.push_back(value(i, v));
      if (binds_nothing(p)) {
        for (const auto& b : branches) {
          if (b.ok()) return MatchResult::unit();
        }
        return MatchResult::failed();
      }
      return make_option(std::move(branches));
    }
    case K::Children: return children(p.keys.front(), v);
    case K::Descendants: return descendants(p.items.front(), v);
  }
  return MatchResult::failed();
}

MatchResult Matcher::pair(const KeyValuePattern& p, const std::string& key, const Value& v) {
  if (p.kind == KeyValuePattern::Kind::Option) {
    std::vector<MatchResult> branches;
    for (const auto& a : p.alternatives) branches.push_back(pair(a, key, v));
    if (binds_nothing(p)) {
      for (const auto& b : branches) {
        if (b.ok()) return MatchResult::unit();
      }
      return MatchResult::failed();
    }
    return make_option(std::move(branches));
  }
  if (p.key_pred && !p.key_pred->matches(key)) return MatchResult::failed();
  MatchResult val = value(p.value.front(), v);
  if (!val.ok()) return val;
  std::vector<MatchResult> parts;
  if (p.key_var) parts.push_back(MatchResult::binding(*p.key_var, Value(key)));
  parts.push_back(std::move(val));
  return MatchResult::tuple(std::move(parts));
}

MatchResult Matcher::in_object(const KeyValuePattern& p, const Value& object) {
  if (p.kind == KeyValuePattern::Kind::Option) {
    std::vector<MatchResult> branches;
    for (const auto& a : p.alternatives) branches.push_back(in_object(a, object));
    if (binds_nothing(p)) {
      for (const auto& b : branches) {
        if (b.ok()) return MatchResult::unit();
      }
      return MatchResult::failed();
    }
    return make_option(std::move(branches));
  }
  for (const auto& [k, v] : object.as_object()) {
    MatchResult r = pair(p, k, v);
    if (r.ok()) return r;
  }
  return MatchResult::failed();
}

MatchResult Matcher::children(const KeyValuePattern& p, const Value& v) {
  if (!v.is_object()) return MatchResult::failed();
  if (binds_nothing(p)) return MatchResult::unit();
  std::vector<MatchResult> elems;
  std::vector<TagSet> tags;
  for (const auto& [k, e] : v.as_object()) {
    MatchResult r = pair(p, k, e);
    if (!r.ok()) continue;
    elems.push_back(std::move(r));
    tags.push_back({next_tag()});
  }
  return MatchResult::array(std::move(elems), std::move(tags));
}

void Matcher::walk(const ValuePattern& p, const Value& v, std::vector<MatchResult>& out, std::vector<TagSet>& tags) {
  MatchResult r = value(p, v);
  if (r.ok()) {
    out.push_back(std::move(r));
    tags.push_back({next_tag()});
  }
  if (v.is_array()) {
    for (const Value& e : v.as_array()) walk(p, e, out, tags);
  } else if (v.is_object()) {
    for (const auto& m : v.as_object()) walk(p, m.second, out, tags);
  }
}

MatchResult Matcher::descendants(const ValuePattern& p, const Value& v) {
  if (binds_nothing(p)) return MatchResult::unit();
  std::vector<MatchResult> elems;
  std::vector<TagSet> tags;
  walk(p, v, elems, tags);
  return MatchResult::array(std::move(elems), std::move(tags));
}

MatchResult match_value(const ValuePattern& p, const Value& v) { return Matcher().value(p, v); }
MatchResult match_children(const KeyValuePattern& p, const Value& v) { return Matcher().children(p, v); }
MatchResult match_descendants(const ValuePattern& p, const Value& v) { return Matcher().descendants(p, v); }
bool match_string_predicate(const StringPredicate& r, std::string_view s) { return r.matches(s); }

namespace {

void render_parts(const MatchResult& r, std::vector<std::string>& out);

std::string render_one(const MatchResult& r) {
  using K = MatchResult::Kind;
  switch (r.kind) {
    case K::Failed: return "_|_";
    case K::Unit: return "()";
    case K::Binding: return "$" + r.var + " -> " + serialize(r.value);
    case K::Tuple: {
      std::vector<std::string> parts;
      render_parts(r, parts);
      std::string s = "(";
      for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
      return s + ")";
    }
    case K::Array: {
      std::string s = "[";
      for (std::size_t i = 0; i < r.items.size(); ++i) s += (i ? "; " : "") + render_one(r.items[i]);
      return s + "]";
    }
    case K::Option: {
      if (r.selected >= 0) return render_one(r.items[static_cast<std::size_t>(r.selected)]);
      std::string s = "(";
      for (std::size_t i = 0; i < r.items.size(); ++i) s += (i ? " | " : "") + render_one(r.items[i]);
      return s + ")";
    }
  }
  return "";
}

void render_parts(const MatchResult& r, std::vector<std::string>& out) {
  for (const auto& c : r.items) {
    const MatchResult* cur = &c;
    if (cur->is_option() && cur->selected >= 0) cur = &cur->items[static_cast<std::size_t>(cur->selected)];
    if (cur->kind == MatchResult::Kind::Tuple) {
      render_parts(*cur, out);
    } else {
      out.push_back(render_one(*cur));
    }
  }
}

}  // namespace

std::string render(const MatchResult& r) { return render_one(r); }

bool instantiates(const MatchResult& r, const Term& t) {
  using K = Term::Kind;
  switch (t.kind) {
    case K::Var: return r.kind == MatchResult::Kind::Binding && r.var == t.name;
    case K::Tuple:
      if (t.items.empty()) return r.kind == MatchResult::Kind::Unit;
      if (r.kind != MatchResult::Kind::Tuple || r.items.size() != t.items.size()) return false;
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (!instantiates(r.items[i], t.items[i])) return false;
      }
      return true;
    case K::Option: {
      if (!r.is_option() || r.items.size() != t.items.size()) return false;
      bool any = false;
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (!r.items[i].ok()) continue;
        if (!instantiates(r.items[i], t.items[i])) return false;
        any = true;
      }
      return any;
    }
    case K::Array:
      if (t.flattened) return instantiates(r, t.elem());
      if (!r.is_array()) return false;
      for (const auto& e : r.items) {
        if (!instantiates(e, t.elem())) return false;
      }
      return true;
    case K::Distinct: return instantiates(r, t.elem());
  }
  return false;
}

}  // namespace jpq
