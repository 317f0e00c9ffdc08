#include "jpq/ast.hpp"

#include <algorithm>

namespace jpq {

bool StringPredicate::matches(std::string_view subject) const {
  std::vector<std::string_view> parts;
  std::string_view rest = pattern;
  for (;;) {
    auto q = rest.find('?');
    if (q == std::string_view::npos) {
      parts.push_back(rest);
      break;
    }
    parts.push_back(rest.substr(0, q));
    rest = rest.substr(q + 1);
  }
  if (parts.size() == 1) return subject == parts[0];
  if (!subject.starts_with(parts.front())) return false;
  std::size_t pos = parts.front().size();
  for (std::size_t i = 1; i + 1 < parts.size(); ++i) {
    auto at = subject.find(parts[i], pos);
    if (at == std::string_view::npos) return false;
    pos = at + parts[i].size();
  }
  const std::string_view last = parts.back();
  return subject.size() >= pos + last.size() && subject.ends_with(last);
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

bool ValuePredicate::matches(const Value& v) const {
  if (!v.is_atom()) return false;
  if (kind == Kind::String) return v.is_string() && text.matches(v.as_string());
  switch (op) {
    case CompareOp::Eq: return v == literal;
    case CompareOp::Ne: return !(v == literal);
    default: break;
  }
  int cmp = 0;
  if (v.is_number() && literal.is_number()) {
    cmp = v.as_number() < literal.as_number() ? -1 : (v.as_number() > literal.as_number() ? 1 : 0);
  } else if (v.is_string() && literal.is_string()) {
    cmp = v.as_string().compare(literal.as_string());
    cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
  } else {
    return false;
  }
  switch (op) {
    case CompareOp::Lt: return cmp < 0;
    case CompareOp::Le: return cmp <= 0;
    case CompareOp::Gt: return cmp > 0;
    case CompareOp::Ge: return cmp >= 0;
    default: return false;
  }
}

bool operator==(const KeyValuePattern& a, const KeyValuePattern& b) {
  return a.kind == b.kind && a.key_var == b.key_var && a.key_pred == b.key_pred && a.value == b.value &&
         a.alternatives == b.alternatives;
}

bool operator==(const ValuePattern& a, const ValuePattern& b) {
  return a.kind == b.kind && a.var == b.var && a.pred == b.pred && a.keys == b.keys && a.items == b.items;
}

bool operator==(const ConstructionPattern& a, const ConstructionPattern& b) {
  return a.kind == b.kind && a.literal == b.literal && a.name == b.name && a.keys == b.keys &&
         a.items == b.items && a.group == b.group && a.order_by == b.order_by && a.order == b.order;
}

bool operator==(const Operand& a, const Operand& b) {
  return a.kind == b.kind && a.literal == b.literal && a.name == b.name && a.fields == b.fields &&
         a.args == b.args && a.vars == b.vars;
}

bool operator==(const Condition& a, const Condition& b) {
  return a.kind == b.kind && a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs && a.items == b.items &&
         a.bound == b.bound && a.range == b.range;
}

namespace {

void push_unique(std::vector<std::string>& out, const std::string& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

void collect(const ValuePattern& p, std::vector<std::string>& out);

void collect(const KeyValuePattern& p, std::vector<std::string>& out) {
  if (p.kind == KeyValuePattern::Kind::Option) {
    for (const auto& a : p.alternatives) collect(a, out);
    return;
  }
  if (p.key_var) out.push_back(*p.key_var);
  for (const auto& v : p.value) collect(v, out);
}

void collect(const ValuePattern& p, std::vector<std::string>& out) {
  if (p.kind == ValuePattern::Kind::Variable) out.push_back(p.var);
  for (const auto& k : p.keys) collect(k, out);
  for (const auto& i : p.items) collect(i, out);
}

void collect(const ConstructionPattern& cp, std::vector<std::string>& out) {
  if (cp.kind == ConstructionPattern::Kind::Variable) push_unique(out, cp.name);
  for (const auto& i : cp.items) collect(i, out);
  for (const auto& i : cp.group) collect(i, out);
  for (const auto& i : cp.order_by) collect(i, out);
}

void collect(const Operand& o, std::vector<std::string>& out) {
  if (o.kind == Operand::Kind::Variable || o.kind == Operand::Kind::Field) push_unique(out, o.name);
  for (const auto& v : o.vars) push_unique(out, v);
  for (const auto& a : o.args) collect(a, out);
}

void collect(const Condition& c, std::vector<std::string>& out) {
  collect(c.lhs, out);
  collect(c.rhs, out);
  for (const auto& v : c.bound) push_unique(out, v);
  for (const auto& v : c.range) push_unique(out, v);
  for (const auto& i : c.items) collect(i, out);
}

}  // namespace

std::vector<std::string> pattern_variables(const ValuePattern& p) {
  std::vector<std::string> out;
  collect(p, out);
  return out;
}

std::vector<std::string> pattern_variables(const KeyValuePattern& p) {
  std::vector<std::string> out;
  collect(p, out);
  return out;
}

std::vector<std::string> construction_variables(const ConstructionPattern& cp) {
  std::vector<std::string> out;
  collect(cp, out);
  return out;
}

std::vector<std::string> condition_variables(const Condition& c) {
  std::vector<std::string> out;
  collect(c, out);
  return out;
}

// ---------------------------------------------------------------- printing

std::string quote(std::string_view s) { return serialize(Value(std::string(s))); }

std::string literal_text(const Value& v) { return serialize(v); }

namespace {

std::string print_vp(const ValuePattern& p, bool nested);

std::string print_kp(const KeyValuePattern& p, bool nested_option) {
  if (p.kind == KeyValuePattern::Kind::Option) {
    std::string s;
    for (std::size_t i = 0; i < p.alternatives.size(); ++i) {
      if (i) s += " | ";
      s += print_kp(p.alternatives[i], true);
    }
    return nested_option ? "(" + s + ")" : s;
  }
  std::string key;
  if (p.key_var) key += "$" + *p.key_var;
  if (p.key_pred) key += quote(p.key_pred->pattern);
  if (key.empty()) key = "*";
  return key + ":" + print_vp(p.value.front(), true);
}

std::string print_pred(const ValuePredicate& pr) {
  if (pr.kind == ValuePredicate::Kind::String) return quote(pr.text.pattern);
  if (pr.op == CompareOp::Eq && !pr.literal.is_string()) return literal_text(pr.literal);
  return "(" + std::string(to_string(pr.op)) + " " + literal_text(pr.literal) + ")";
}

// `nested` asks for parentheses around forms whose trailing `|` or key-value
// syntax would otherwise bind into the enclosing construct.
std::string print_vp(const ValuePattern& p, bool nested) {
  using K = ValuePattern::Kind;
  switch (p.kind) {
    case K::Variable: return "$" + p.var;
    case K::Predicate: return print_pred(p.pred);
    case K::Wildcard: return "*";
    case K::Object: {
      std::string s = "{";
      for (std::size_t i = 0; i < p.keys.size(); ++i) {
        if (i) s += ", ";
        s += print_kp(p.keys[i], false);
      }
      return s + "}";
    }
    case K::Array: return "[" + print_vp(p.items.front(), false) + "]";
    case K::Conjunction: {
      std::string s = "<";
      for (std::size_t i = 0; i < p.items.size(); ++i) {
        if (i) s += ", ";
        s += print_vp(p.items[i], false);
      }
      return s + ">";
    }
    case K::Option: {
      std::string s;
      for (std::size_t i = 0; i < p.items.size(); ++i) {
        if (i) s += " | ";
        s += print_vp(p.items[i], true);
      }
      return nested ? "(" + s + ")" : s;
    }
    case K::Children: {
      std::string s = "/" + print_kp(p.keys.front(), false);
      return nested ? "(" + s + ")" : s;
    }
    case K::Descendants: return "//" + print_vp(p.items.front(), true);
  }
  return "";
}

std::string print_cp(const ConstructionPattern& cp, bool nested);

std::string print_cp_primary(const ConstructionPattern& cp) {
  using K = ConstructionPattern::Kind;
  if (cp.kind == K::Option || cp.kind == K::Array) return "(" + print_cp(cp, false) + ")";
  return print_cp(cp, false);
}

std::string print_cp(const ConstructionPattern& cp, bool nested) {
  using K = ConstructionPattern::Kind;
  switch (cp.kind) {
    case K::Literal: return literal_text(cp.literal);
    case K::Variable: return "$" + cp.name;
    case K::Object: {
      std::string s = "{";
      for (std::size_t i = 0; i < cp.items.size(); ++i) {
        if (i) s += ", ";
        s += quote(cp.keys[i]) + ":" + print_cp(cp.items[i], false);
      }
      return s + "}";
    }
    case K::Array: {
      std::string s = "[" + print_cp(cp.items.front(), false) + "]";
      if (!cp.group.empty()) s += " groupby " + print_cp_primary(cp.group.front());
      if (!cp.order_by.empty()) s += " orderby " + print_cp_primary(cp.order_by.front());
      if (cp.order == ConstructionPattern::Order::Asc) s += " asc";
      if (cp.order == ConstructionPattern::Order::Desc) s += " desc";
      return s;
    }
    case K::Flattened: return "^[" + print_cp(cp.items.front(), false) + "]";
    case K::Option: {
      std::string s;
      for (std::size_t i = 0; i < cp.items.size(); ++i) {
        if (i) s += " | ";
        s += print_cp(cp.items[i], true);
      }
      return nested ? "(" + s + ")" : s;
    }
    case K::Call: {
      std::string s = cp.name + "(";
      for (std::size_t i = 0; i < cp.items.size(); ++i) {
        if (i) s += ", ";
        s += print_cp(cp.items[i], false);
      }
      return s + ")";
    }
    case K::Distinct: return print_cp_primary(cp.items.front()) + "%";
  }
  return "";
}

std::string print_operand(const Operand& o) {
  using K = Operand::Kind;
  switch (o.kind) {
    case K::Literal: return literal_text(o.literal);
    case K::Variable: return "$" + o.name;
    case K::Field: {
      std::string s = "$" + o.name;
      for (const auto& f : o.fields) s += "." + quote(f);
      return s;
    }
    case K::Call: {
      std::string s = o.name + "(";
      for (std::size_t i = 0; i < o.args.size(); ++i) {
        if (i) s += ", ";
        s += print_operand(o.args[i]);
      }
      return s + ")";
    }
    case K::ArrayTerm: {
      std::string s = "[";
      for (std::size_t i = 0; i < o.vars.size(); ++i) {
        if (i) s += ", ";
        s += "$" + o.vars[i];
      }
      return s + "]";
    }
  }
  return "";
}

int level(const Condition& c) {
  using K = Condition::Kind;
  switch (c.kind) {
    case K::With: return 0;
    case K::Par: return 1;
    case K::Or: return 2;
    case K::And: return 3;
    default: return 4;
  }
}

std::string print_cond(const Condition& c, int min_level);

std::string print_vars(const std::vector<std::string>& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ", ";
    s += "$" + vs[i];
  }
  return s;
}

std::string print_cond(const Condition& c, int min_level) {
  using K = Condition::Kind;
  std::string s;
  switch (c.kind) {
    case K::Test: s = print_operand(c.lhs); break;
    case K::Compare: s = print_operand(c.lhs) + " " + std::string(to_string(c.op)) + " " + print_operand(c.rhs); break;
    case K::Not: s = "not (" + print_cond(c.items.front(), 0) + ")"; break;
    case K::And:
    case K::Or:
    case K::Par:
    case K::With: {
      static const char* names[] = {"", "", "", "and", "or", "par", "with"};
      int lv = level(c);
      s = print_cond(c.items[0], lv) + " " + names[static_cast<int>(c.kind)] + " " + print_cond(c.items[1], lv + 1);
      break;
    }
    case K::ForEach:
    case K::ForSome: {
      s = std::string("(") + (c.kind == K::ForEach ? "foreach " : "forsome ");
      s += c.bound.size() == 1 ? "$" + c.bound.front() : "(" + print_vars(c.bound) + ")";
      if (c.range != c.bound) s += " in [" + print_vars(c.range) + "]";
      s += "; " + print_cond(c.items.front(), 2) + ")";
      break;
    }
  }
  if (level(c) < min_level) return "(" + s + ")";
  return s;
}

}  // namespace

std::string unparse(const ValuePattern& p) { return print_vp(p, false); }
std::string unparse(const KeyValuePattern& p) { return print_kp(p, false); }
std::string unparse(const ConstructionPattern& cp) { return print_cp(cp, false); }
std::string unparse(const Condition& c) { return print_cond(c, 0); }

std::string unparse(const QueryAst& q) {
  std::string s = "from ";
  for (std::size_t i = 0; i < q.sources.size(); ++i) {
    if (i) s += ", ";
    s += "doc(" + quote(q.sources[i].doc) + ") " + print_vp(q.sources[i].pattern, false);
  }
  s += "\nconstruct " + unparse(q.construct);
  if (q.where) s += "\nwhere " + unparse(*q.where);
  return s;
}

}  // namespace jpq
