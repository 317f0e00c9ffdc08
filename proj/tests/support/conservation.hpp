// Data-conservation checks for single rewriting steps, computed from the
// term and the data directly.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jpq/matcher.hpp"
#include "jpq/rewriter.hpp"
#include "jpq/term.hpp"

namespace oracle {

/// Data nodes sitting at `path` of t, one per enclosing array element.
inline void instances(const jpq::Term& t, const jpq::MatchResult& d, const jpq::TermPath& path, std::size_t pos,
                      std::vector<const jpq::MatchResult*>& out) {
  using K = jpq::Term::Kind;
  if (!d.ok()) return;
  if (pos == path.size()) {
    out.push_back(&d);
    return;
  }
  const auto i = static_cast<std::size_t>(path[pos]);
  switch (t.kind) {
    case K::Tuple:
    case K::Option: instances(t.items[i], d.items[i], path, pos + 1, out); return;
    case K::Distinct: instances(t.elem(), d, path, pos + 1, out); return;
    case K::Array:
      if (t.flattened) {
        instances(t.elem(), d, path, pos + 1, out);
        return;
      }
      for (const auto& e : d.items) instances(t.elem(), e, path, pos + 1, out);
      return;
    case K::Var: return;
  }
}

inline std::vector<const jpq::MatchResult*> instances(const jpq::Term& t, const jpq::MatchResult& d, const jpq::TermPath& path) {
  std::vector<const jpq::MatchResult*> out;
  instances(t, d, path, 0, out);
  return out;
}

/// How many elements one anchor element turns into when the array `rel`
/// below it is flattened: its length, or 1 if an option branch other than
/// the one in effect leads there.
inline std::size_t released(const jpq::Term& t, const jpq::MatchResult& d, const jpq::TermPath& rel, std::size_t pos) {
  using K = jpq::Term::Kind;
  if (pos == rel.size()) return d.items.size();
  const auto i = static_cast<std::size_t>(rel[pos]);
  if (t.kind == K::Array) return released(t.elem(), d, rel, pos + 1);
  if (t.kind == K::Option) {
    int eff = d.selected;
    for (std::size_t k = 0; eff < 0 && k < d.items.size(); ++k) {
      if (d.items[k].ok()) eff = static_cast<int>(k);
    }
    if (eff != static_cast<int>(i)) return 1;
  }
  return released(t.items[i], d.items[i], rel, pos + 1);
}

/// Checks one step; returns a description of the first violation.
inline std::optional<std::string> check_step(const jpq::Term& before, const jpq::MatchResult& d0,
                                             const jpq::RewriteStep& step, const jpq::MatchResult& d1) {
  using R = jpq::RewriteRule;
  const jpq::Term after = jpq::apply_step(step, before);
  if (!jpq::instantiates(d1, after)) return "result no longer instantiates " + jpq::to_string(after);
  switch (step.rule) {
    case R::ArrayTupleDistribution: {
      auto a = instances(before, d0, step.path);
      auto b = instances(after, d1, step.path);
      if (a.size() != b.size()) return std::string("distribution changed the number of instances");
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (b[k]->items.size() != a[k]->items[1].items.size()) return std::string("distribution output length differs from the inner array");
      }
      return std::nullopt;
    }
    case R::ArrayFlattening: {
      std::size_t cut = step.path.size();
      while (cut-- > 0) {
        const jpq::Term& a = jpq::subterm(before, jpq::TermPath(step.path.begin(), step.path.begin() + static_cast<long>(cut)));
        if (a.kind == jpq::Term::Kind::Array && !a.flattened) break;
      }
      jpq::TermPath anchor(step.path.begin(), step.path.begin() + static_cast<long>(cut));
      jpq::TermPath rel(step.path.begin() + static_cast<long>(cut) + 1, step.path.end());
      const jpq::Term& elem = jpq::subterm(before, anchor).elem();
      auto a = instances(before, d0, anchor);
      auto b = instances(after, d1, anchor);
      if (a.size() != b.size()) return std::string("flattening changed the number of instances");
      for (std::size_t k = 0; k < a.size(); ++k) {
        std::size_t sum = 0;
        for (const auto& e : a[k]->items) sum += released(elem, e, rel, 0);
        if (b[k]->items.size() != sum) return "flattened length " + std::to_string(b[k]->items.size()) + " != sum of parts " + std::to_string(sum);
      }
      return std::nullopt;
    }
    case R::ArrayTplFolding: {
      auto a = instances(before, d0, step.path);
      auto b = instances(after, d1, step.path);
      if (a.size() != b.size()) return std::string("folding changed the number of instances");
      for (std::size_t k = 0; k < a.size(); ++k) {
        std::vector<const jpq::MatchResult*> seen;
        std::size_t next = 0;
        for (const auto& cls : b[k]->items) {
          const jpq::MatchResult& key = cls.items[1];
          for (const auto* s : seen) {
            if (jpq::same_data(*s, key)) return std::string("two classes share a key");
          }
          seen.push_back(&key);
          if (cls.items[0].items.empty()) return std::string("empty class");
          for (const auto& e : cls.items[0].items) {
            if (!jpq::same_data(e.items[0], key)) return std::string("class member key differs from the class key");
          }
        }
        // Every element lands in exactly one class, keeping relative order.
        for (const auto& e : a[k]->items) {
          bool found = false;
          for (const auto& cls : b[k]->items) {
            if (!jpq::same_data(cls.items[1], e.items[0])) continue;
            found = true;
            std::size_t before_e = 0;
            for (const auto& x : a[k]->items) {
              if (&x == &e) break;
              if (jpq::same_data(x.items[0], e.items[0])) ++before_e;
            }
            if (before_e >= cls.items[0].items.size() || !jpq::same_data(cls.items[0].items[before_e], e)) {
              return std::string("class does not hold the element in order");
            }
          }
          if (!found) return std::string("element missing from every class");
          ++next;
        }
        std::size_t total = 0;
        for (const auto& cls : b[k]->items) total += cls.items[0].items.size();
        if (total != next) return std::string("classes do not partition the array");
      }
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

}  // namespace oracle
