#include "jpq/term.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "jpq/error.hpp"

namespace jpq {

Term Term::var(std::string name) {
  Term t;
  t.kind = Kind::Var;
  t.name = std::move(name);
  return t;
}

Term Term::tuple(std::vector<Term> items) {
  Term t;
  for (auto& i : items) {
    if (i.kind == Kind::Tuple) {
      for (auto& c : i.items) t.items.push_back(std::move(c));
    } else {
      t.items.push_back(std::move(i));
    }
  }
  if (t.items.size() == 1) return std::move(t.items.front());
  return t;
}

Term Term::option(std::vector<Term> items) {
  Term t;
  t.kind = Kind::Option;
  for (auto& i : items) {
    if (i.kind == Kind::Option) {
      for (auto& c : i.items) t.items.push_back(std::move(c));
    } else {
      t.items.push_back(std::move(i));
    }
  }
  if (t.items.size() == 1) return std::move(t.items.front());
  return t;
}

Term Term::array(Term elem) {
  auto idx = std::make_shared<const Term>(elem);
  Term t;
  t.kind = Kind::Array;
  t.items.push_back(std::move(elem));
  t.index = std::move(idx);
  return t;
}

Term Term::array(Term elem, Term index, bool flattened) {
  Term t;
  t.kind = Kind::Array;
  t.items.push_back(std::move(elem));
  t.index = std::make_shared<const Term>(std::move(index));
  t.flattened = flattened;
  return t;
}

Term Term::array_unindexed(Term elem, bool flattened) {
  Term t;
  t.kind = Kind::Array;
  t.items.push_back(std::move(elem));
  t.flattened = flattened;
  return t;
}

Term Term::distinct(Term inner) {
  Term t;
  t.kind = Kind::Distinct;
  t.items.push_back(std::move(inner));
  return t;
}

bool operator==(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.name != b.name || a.flattened != b.flattened || a.items != b.items) return false;
  if (static_cast<bool>(a.index) != static_cast<bool>(b.index)) return false;
  return !a.index || *a.index == *b.index;
}

std::string to_string(const TermPath& path) {
  if (path.empty()) return "/";
  std::string s;
  for (int i : path) s += "/" + std::to_string(i);
  return s;
}

std::string to_string(const Term& t) {
  using K = Term::Kind;
  switch (t.kind) {
    case K::Var: return "$" + t.name;
    case K::Tuple: {
      std::string s = "(";
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (i) s += ", ";
        s += to_string(t.items[i]);
      }
      return s + ")";
    }
    case K::Option: {
      std::string s;
      for (std::size_t i = 0; i < t.items.size(); ++i) {
        if (i) s += " | ";
        const Term& b = t.items[i];
        s += b.kind == K::Option ? "(" + to_string(b) + ")" : to_string(b);
      }
      return s;
    }
    case K::Array: {
      std::string s = (t.flattened ? "^[" : "[") + to_string(t.elem()) + "]";
      if (!t.index) return s + "_?";
      if (*t.index == t.elem()) return s;
      return s + "_{" + to_string(*t.index) + "}";
    }
    case K::Distinct: {
      const Term& in = t.elem();
      return (in.kind == K::Option ? "(" + to_string(in) + ")" : to_string(in)) + "%";
    }
  }
  return "";
}

namespace {

class TermParser {
 public:
  explicit TermParser(std::string_view s) : s_(s) {}

  Term parse() {
    Term t = term();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing text");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg + " in term", 1, pos_ + 1); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  Term term() {
    std::vector<Term> alts;
    alts.push_back(alt());
    while (eat('|')) alts.push_back(alt());
    if (alts.size() == 1) return std::move(alts.front());
    Term t;
    t.kind = Term::Kind::Option;
    t.items = std::move(alts);
    return t;
  }

  Term alt() {
    Term t = primary();
    while (eat('%')) t = Term::distinct(std::move(t));
    return t;
  }

  Term primary() {
    skip();
    if (eat('$')) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      if (start == pos_) fail("expected variable name");
      return Term::var(std::string(s_.substr(start, pos_ - start)));
    }
    if (eat('(')) {
      std::vector<Term> items;
      if (!eat(')')) {
        items.push_back(term());
        while (eat(',')) items.push_back(term());
        expect(')');
      }
      if (items.size() == 1) return std::move(items.front());
      Term t;
      t.items = std::move(items);
      return t;
    }
    bool flat = eat('^');
    if (eat('[')) {
      Term elem = term();
      expect(']');
      skip();
      if (eat('_')) {
        if (eat('?')) return Term::array_unindexed(std::move(elem), flat);
        expect('{');
        Term idx = term();
        expect('}');
        return Term::array(std::move(elem), std::move(idx), flat);
      }
      Term t = Term::array(std::move(elem));
      t.flattened = flat;
      return t;
    }
    fail("expected term");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void flatten_tuple(const Term& t, std::vector<const Term*>& out) {
  for (const Term& c : t.items) {
    if (c.kind == Term::Kind::Tuple) {
      flatten_tuple(c, out);
    } else {
      out.push_back(&c);
    }
  }
}

void flatten_option(const Term& t, std::vector<const Term*>& out) {
  for (const Term& c : t.items) {
    if (c.kind == Term::Kind::Option) {
      flatten_option(c, out);
    } else {
      out.push_back(&c);
    }
  }
}

}  // namespace

Term parse_term(std::string_view text) { return TermParser(text).parse(); }

std::string canonical(const Term& t, bool with_index, bool unordered_options) {
  using K = Term::Kind;
  switch (t.kind) {
    case K::Var: return "$" + t.name;
    case K::Tuple: {
      std::vector<const Term*> parts;
      flatten_tuple(t, parts);
      if (parts.size() == 1) return canonical(*parts.front(), with_index, unordered_options);
      std::vector<std::string> cs;
      for (const Term* p : parts) cs.push_back(canonical(*p, with_index, unordered_options));
      std::sort(cs.begin(), cs.end());
      std::string s = "(";
      for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? "," : "") + cs[i];
      return s + ")";
    }
    case K::Option: {
      std::vector<const Term*> parts;
      flatten_option(t, parts);
      std::vector<std::string> cs;
      for (const Term* p : parts) cs.push_back(canonical(*p, with_index, unordered_options));
      if (unordered_options) std::sort(cs.begin(), cs.end());
      std::string s = "{";
      for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? "|" : "") + cs[i];
      return s + "}";
    }
    case K::Array: {
      std::string s = (t.flattened ? "^[" : "[") + canonical(t.elem(), with_index, unordered_options) + "]";
      if (with_index) s += "_" + (t.index ? canonical(*t.index, false, true) : std::string("?"));
      return s;
    }
    case K::Distinct: return canonical(t.elem(), false, true) + "%";
  }
  return "";
}

namespace {

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) out.insert(t.name);
  for (const Term& c : t.items) collect_vars(c, out);
}

void tally(const Term& t, std::vector<std::pair<std::string, int>>& counts) {
  if (t.kind == Term::Kind::Var) {
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == t.name; });
    if (it == counts.end()) {
      counts.emplace_back(t.name, 1);
    } else {
      ++it->second;
    }
  }
  for (const Term& c : t.items) tally(c, counts);
}

}  // namespace

std::set<std::string> var_set(const Term& t) {
  std::set<std::string> out;
  collect_vars(t, out);
  return out;
}

void count_vars(const Term& t, std::vector<std::pair<std::string, int>>& counts) { tally(t, counts); }

int count_var(const Term& t, const std::string& name) {
  int n = t.kind == Term::Kind::Var && t.name == name ? 1 : 0;
  for (const Term& c : t.items) n += count_var(c, name);
  return n;
}

const Term& subterm(const Term& t, const TermPath& path) {
  const Term* cur = &t;
  for (int i : path) {
    if (i < 0 || static_cast<std::size_t>(i) >= cur->items.size() || cur->kind == Term::Kind::Var) {
      throw Error(ErrorKind::Internal, "term path " + to_string(path) + " does not address " + to_string(t));
    }
    cur = &cur->items[static_cast<std::size_t>(i)];
  }
  return *cur;
}

Term& subterm(Term& t, const TermPath& path) {
  return const_cast<Term&>(subterm(static_cast<const Term&>(t), path));
}

int depth(const Term& t) {
  int d = 0;
  for (const Term& c : t.items) d = std::max(d, depth(c));
  return t.kind == Term::Kind::Var ? 0 : d + 1;
}

}  // namespace jpq
