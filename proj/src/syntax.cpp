#include "jpq/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "jpq/error.hpp"

namespace jpq {

namespace {

enum class Tok {
  End, Var, String, Number, Ident,
  LBrace, RBrace, LBrack, RBrack, LParen, RParen,
  Lt, Gt, Le, Ge, Eq, Ne,
  Comma, Colon, Pipe, Slash, DSlash, Star, Caret, Percent, Semi, Dot,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier/variable name, decoded string, number lexeme
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Var: return "'$" + t.text + "'";
    case Tok::String: return "string " + quote(t.text);
    case Tok::Number:
    case Tok::Ident: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      char c = s_[pos_];
      if (c == '$') {
        advance();
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_ident(s_[pos_])) advance();
        if (start == pos_) throw SyntaxError("expected variable name after '$'", t.line, t.column);
        t.kind = Tok::Var;
        t.text = std::string(s_.substr(start, pos_ - start));
      } else if (c == '"' || c == '\'') {
        t.kind = Tok::String;
        t.text = string_literal(t);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        t.kind = Tok::Number;
        t.text = number();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_ident(s_[pos_])) advance();
        t.kind = Tok::Ident;
        t.text = std::string(s_.substr(start, pos_ - start));
      } else {
        punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        advance();
      } else if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string string_literal(const Token& t) {
    char q = s_[pos_];
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= s_.size()) throw SyntaxError("unterminated string", t.line, t.column);
      char c = s_[pos_];
      if (c == q) {
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= s_.size()) throw SyntaxError("unterminated string", t.line, t.column);
        char e = s_[pos_];
        advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case 'u': {
            // Decode via the JSON reader to get surrogates right.
            std::string esc = "\"\\u";
            for (int i = 0; i < 4 && pos_ < s_.size(); ++i) {
              esc += s_[pos_];
              advance();
            }
            bool high = esc.size() == 7 && (esc[3] == 'd' || esc[3] == 'D') &&
                        std::string_view("89abAB").find(esc[4]) != std::string_view::npos;
            if (high && pos_ + 1 < s_.size() && s_[pos_] == '\\' && s_[pos_ + 1] == 'u') {
              for (int i = 0; i < 6 && pos_ < s_.size(); ++i) {
                esc += s_[pos_];
                advance();
              }
            }
            esc += '"';
            try {
              Value v = parse_document(esc);
              out += v.as_string();
            } catch (const Error&) {
              throw SyntaxError("invalid \\u escape", line_, column_);
            }
            break;
          }
          default: out += e; break;
        }
        continue;
      }
      out += c;
      advance();
    }
  }

  std::string number() {
    std::size_t start = pos_;
    if (s_[pos_] == '-') advance();
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
    if (pos_ + 1 < s_.size() && s_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      advance();
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      advance();
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) advance();
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
      } else {
        pos_ = save;
      }
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  void punct(Token& t) {
    char c = s_[pos_];
    char n = pos_ + 1 < s_.size() ? s_[pos_ + 1] : '\0';
    auto two = [&](Tok k, const char* text) {
      t.kind = k;
      t.text = text;
      advance();
      advance();
    };
    auto one = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      advance();
    };
    switch (c) {
      case '{': return one(Tok::LBrace);
      case '}': return one(Tok::RBrace);
      case '[': return one(Tok::LBrack);
      case ']': return one(Tok::RBrack);
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case ',': return one(Tok::Comma);
      case ':': return one(Tok::Colon);
      case '|': return one(Tok::Pipe);
      case '*': return one(Tok::Star);
      case '^': return one(Tok::Caret);
      case '%': return one(Tok::Percent);
      case ';': return one(Tok::Semi);
      case '.': return one(Tok::Dot);
      case '=': return n == '=' ? two(Tok::Eq, "==") : one(Tok::Eq);
      case '/': return n == '/' ? two(Tok::DSlash, "//") : one(Tok::Slash);
      case '<': return n == '=' ? two(Tok::Le, "<=") : one(Tok::Lt);
      case '>': return n == '=' ? two(Tok::Ge, ">=") : one(Tok::Gt);
      case '!':
        if (n == '=') return two(Tok::Ne, "!=");
        break;
      default: break;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", t.line, t.column);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

bool is_compare(Tok k) {
  return k == Tok::Eq || k == Tok::Ne || k == Tok::Lt || k == Tok::Le || k == Tok::Gt || k == Tok::Ge;
}

CompareOp compare_op(Tok k) {
  switch (k) {
    case Tok::Eq: return CompareOp::Eq;
    case Tok::Ne: return CompareOp::Ne;
    case Tok::Lt: return CompareOp::Lt;
    case Tok::Le: return CompareOp::Le;
    case Tok::Gt: return CompareOp::Gt;
    default: return CompareOp::Ge;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  QueryAst query() {
    QueryAst q;
    expect_keyword("from");
    do {
      q.sources.push_back(source());
    } while (accept(Tok::Comma));
    expect_keyword("construct");
    q.construct = construction();
    if (accept_keyword("where")) q.where = condition();
    expect_end();
    return q;
  }

  ValuePattern pattern_only() {
    ValuePattern p = vp();
    expect_end();
    return p;
  }

  ConstructionPattern construction_only() {
    ConstructionPattern cp = construction();
    expect_end();
    return cp;
  }

  Condition condition_only() {
    Condition c = condition();
    expect_end();
    return c;
  }

  const Token& at(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = at();
    throw SyntaxError(msg + ", found " + describe(t), t.line, t.column);
  }

  bool check(Tok k, std::size_t ahead = 0) const { return at(ahead).kind == k; }
  bool check_keyword(std::string_view kw, std::size_t ahead = 0) const {
    return at(ahead).kind == Tok::Ident && at(ahead).text == kw;
  }
  bool accept(Tok k) {
    if (!check(k)) return false;
    ++pos_;
    return true;
  }
  bool accept_keyword(std::string_view kw) {
    if (!check_keyword(kw)) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (!check(k)) fail(std::string("expected ") + what);
    return toks_[pos_++];
  }
  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail("expected '" + std::string(kw) + "'");
  }
  void expect_end() {
    if (!check(Tok::End)) fail("unexpected input");
  }

  Value literal_value(const Token& t) {
    if (t.kind == Tok::String) return Value(t.text);
    if (t.kind == Tok::Number) {
      double d = 0;
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
      if (res.ec != std::errc()) throw SyntaxError("invalid number '" + t.text + "'", t.line, t.column);
      return Value(d);
    }
    if (t.text == "true") return Value(true);
    if (t.text == "false") return Value(false);
    return Value(Empty{});
  }

  bool at_literal_keyword() const {
    return check(Tok::Ident) && (at().text == "true" || at().text == "false" || at().text == "null");
  }

  Source source() {
    expect_keyword("doc");
    expect(Tok::LParen, "'(' after doc");
    Source s;
    s.doc = expect(Tok::String, "document name string").text;
    expect(Tok::RParen, "')'");
    s.pattern = vp();
    return s;
  }

  // ---------------------------------------------------------- patterns

  ValuePattern vp() {
    ValuePattern first = vp_alt();
    if (!check(Tok::Pipe)) return first;
    ValuePattern opt;
    opt.kind = ValuePattern::Kind::Option;
    opt.items.push_back(std::move(first));
    while (accept(Tok::Pipe)) opt.items.push_back(vp_alt());
    return opt;
  }

  bool starts_juxtaposed() const {
    switch (at().kind) {
      case Tok::LBrace:
      case Tok::LBrack:
      case Tok::Lt:
      case Tok::LParen:
      case Tok::String:
      case Tok::Slash:
      case Tok::DSlash: return true;
      default: return false;
    }
  }

  ValuePattern vp_alt() {
    ValuePattern p = vp_primary();
    if (p.kind == ValuePattern::Kind::Variable && starts_juxtaposed()) {
      ValuePattern conj;
      conj.kind = ValuePattern::Kind::Conjunction;
      conj.items.push_back(std::move(p));
      conj.items.push_back(vp_primary());
      return conj;
    }
    return p;
  }

  ValuePattern vp_primary() {
    using K = ValuePattern::Kind;
    ValuePattern p;
    const Token& t = at();
    switch (t.kind) {
      case Tok::Var:
        p.kind = K::Variable;
        p.var = t.text;
        ++pos_;
        return p;
      case Tok::String:
        p.kind = K::Predicate;
        p.pred.kind = ValuePredicate::Kind::String;
        p.pred.text.pattern = t.text;
        ++pos_;
        return p;
      case Tok::Number:
        p.kind = K::Predicate;
        p.pred.literal = literal_value(t);
        ++pos_;
        return p;
      case Tok::Star:
        ++pos_;
        p.kind = K::Wildcard;
        return p;
      case Tok::LBrace:
        ++pos_;
        p.kind = K::Object;
        if (accept(Tok::RBrace)) return p;
        do {
          p.keys.push_back(kp());
        } while (accept(Tok::Comma));
        expect(Tok::RBrace, "',' or '}' in object pattern");
        return p;
      case Tok::LBrack:
        ++pos_;
        p.kind = K::Array;
        p.items.push_back(vp());
        expect(Tok::RBrack, "']' closing array pattern");
        return p;
      case Tok::Lt:
        ++pos_;
        p.kind = K::Conjunction;
        p.items.push_back(vp());
        expect(Tok::Comma, "',' in conjunctive pattern (at least two components)");
        p.items.push_back(vp());
        while (accept(Tok::Comma)) p.items.push_back(vp());
        expect(Tok::Gt, "'>' closing conjunctive pattern");
        return p;
      case Tok::LParen:
        ++pos_;
        // `(< 5)` is a predicate, `(<$a, $b>)` a parenthesized conjunction.
        if (is_compare(at().kind) && (check(Tok::String, 1) || check(Tok::Number, 1) || check_keyword("true", 1) ||
                                      check_keyword("false", 1) || check_keyword("null", 1)) &&
            check(Tok::RParen, 2)) {
          p.kind = K::Predicate;
          p.pred.op = compare_op(at().kind);
          ++pos_;
          const Token& lit = at();
          if (lit.kind != Tok::String && lit.kind != Tok::Number && !at_literal_keyword()) fail("expected literal");
          p.pred.literal = literal_value(lit);
          ++pos_;
          expect(Tok::RParen, "')' closing predicate");
          return p;
        }
        p = vp();
        expect(Tok::RParen, "')'");
        return p;
      case Tok::Slash:
        ++pos_;
        p.kind = K::Children;
        p.keys.push_back(kp());
        return p;
      case Tok::DSlash:
        ++pos_;
        p.kind = K::Descendants;
        p.items.push_back(vp_alt());
        return p;
      case Tok::Ident:
        if (at_literal_keyword()) {
          p.kind = K::Predicate;
          p.pred.literal = literal_value(t);
          ++pos_;
          return p;
        }
        [[fallthrough]];
      default: fail("expected pattern");
    }
  }

  KeyValuePattern kp() {
    KeyValuePattern first = kp_alt();
    if (!check(Tok::Pipe)) return first;
    KeyValuePattern opt;
    opt.kind = KeyValuePattern::Kind::Option;
    opt.alternatives.push_back(std::move(first));
    while (accept(Tok::Pipe)) opt.alternatives.push_back(kp_alt());
    return opt;
  }

  KeyValuePattern kp_alt() {
    KeyValuePattern p;
    if (check(Tok::LParen)) {
      bool var_pred_key = check(Tok::Var, 1) && check(Tok::String, 2) && check(Tok::RParen, 3);
      if (!var_pred_key) {
        ++pos_;
        p = kp();
        expect(Tok::RParen, "')'");
        return p;
      }
      ++pos_;
      p.key_var = at().text;
      p.key_pred = StringPredicate{at(1).text};
      pos_ += 3;
    } else if (check(Tok::Var)) {
      p.key_var = at().text;
      ++pos_;
      if (check(Tok::String)) {
        p.key_pred = StringPredicate{at().text};
        ++pos_;
      }
    } else if (check(Tok::String)) {
      p.key_pred = StringPredicate{at().text};
      ++pos_;
    } else if (!accept(Tok::Star)) {
      fail("expected key pattern");
    }
    expect(Tok::Colon, "':' in key-value pattern");
    p.value.push_back(vp_alt());
    return p;
  }

  // ---------------------------------------------------------- construction

  ConstructionPattern construction() {
    ConstructionPattern first = cp_postfix();
    if (!check(Tok::Pipe)) return first;
    ConstructionPattern opt;
    opt.kind = ConstructionPattern::Kind::Option;
    opt.items.push_back(std::move(first));
    while (accept(Tok::Pipe)) opt.items.push_back(cp_postfix());
    return opt;
  }

  ConstructionPattern cp_postfix() {
    ConstructionPattern cp = cp_primary();
    while (accept(Tok::Percent)) {
      ConstructionPattern d;
      d.kind = ConstructionPattern::Kind::Distinct;
      d.items.push_back(std::move(cp));
      cp = std::move(d);
    }
    return cp;
  }

  ConstructionPattern cp_primary() {
    using K = ConstructionPattern::Kind;
    ConstructionPattern cp;
    const Token& t = at();
    switch (t.kind) {
      case Tok::String:
        ++pos_;
        if (accept(Tok::Colon)) {
          cp.kind = K::Object;
          cp.keys.push_back(t.text);
          cp.items.push_back(cp_postfix());
          return cp;
        }
        cp.literal = Value(t.text);
        return cp;
      case Tok::Number:
        ++pos_;
        cp.literal = literal_value(t);
        return cp;
      case Tok::Var:
        ++pos_;
        cp.kind = K::Variable;
        cp.name = t.text;
        return cp;
      case Tok::LBrace: {
        ++pos_;
        cp.kind = K::Object;
        if (accept(Tok::RBrace)) return cp;
        do {
          const Token& key = expect(Tok::String, "member key string");
          expect(Tok::Colon, "':' after member key");
          cp.keys.push_back(key.text);
          cp.items.push_back(construction());
        } while (accept(Tok::Comma));
        expect(Tok::RBrace, "',' or '}' in object constructor");
        return cp;
      }
      case Tok::LBrack:
        ++pos_;
        cp.kind = K::Array;
        cp.items.push_back(construction());
        expect(Tok::RBrack, "']' closing array constructor");
        if (accept_keyword("groupby")) cp.group.push_back(cp_postfix());
        if (accept_keyword("orderby")) cp.order_by.push_back(cp_postfix());
        if (accept_keyword("asc")) {
          cp.order = ConstructionPattern::Order::Asc;
        } else if (accept_keyword("desc")) {
          cp.order = ConstructionPattern::Order::Desc;
        }
        return cp;
      case Tok::Caret:
        ++pos_;
        expect(Tok::LBrack, "'[' after '^'");
        cp.kind = K::Flattened;
        cp.items.push_back(construction());
        expect(Tok::RBrack, "']' closing flattened array");
        return cp;
      case Tok::LParen:
        ++pos_;
        cp = construction();
        expect(Tok::RParen, "')'");
        return cp;
      case Tok::Ident:
        if (at_literal_keyword()) {
          ++pos_;
          cp.literal = literal_value(t);
          return cp;
        }
        if (check(Tok::LParen, 1)) {
          cp.kind = K::Call;
          cp.name = t.text;
          pos_ += 2;
          if (!accept(Tok::RParen)) {
            do {
              cp.items.push_back(construction());
            } while (accept(Tok::Comma));
            expect(Tok::RParen, "')' closing call");
          }
          return cp;
        }
        [[fallthrough]];
      default: fail("expected construction pattern");
    }
  }

  // ---------------------------------------------------------- conditions

  Condition binary(Condition::Kind kind, Condition lhs, Condition rhs) {
    Condition c;
    c.kind = kind;
    c.items.push_back(std::move(lhs));
    c.items.push_back(std::move(rhs));
    return c;
  }

  Condition condition() {
    Condition c = cond_par();
    while (accept_keyword("with")) c = binary(Condition::Kind::With, std::move(c), cond_par());
    return c;
  }

  Condition cond_par() {
    Condition c = cond_or();
    while (accept_keyword("par")) c = binary(Condition::Kind::Par, std::move(c), cond_or());
    return c;
  }

  Condition cond_or() {
    Condition c = cond_and();
    while (accept_keyword("or")) c = binary(Condition::Kind::Or, std::move(c), cond_and());
    return c;
  }

  Condition cond_and() {
    Condition c = cond_unary();
    while (accept_keyword("and")) c = binary(Condition::Kind::And, std::move(c), cond_unary());
    return c;
  }

  std::vector<std::string> var_list() {
    std::vector<std::string> vs;
    if (accept(Tok::LParen)) {
      do {
        vs.push_back(expect(Tok::Var, "variable").text);
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    } else {
      vs.push_back(expect(Tok::Var, "quantified variable").text);
    }
    return vs;
  }

  Condition cond_unary() {
    if (accept_keyword("not")) {
      Condition c;
      c.kind = Condition::Kind::Not;
      c.items.push_back(cond_unary());
      return c;
    }
    if (check_keyword("foreach") || check_keyword("forsome")) {
      Condition c;
      c.kind = at().text == "foreach" ? Condition::Kind::ForEach : Condition::Kind::ForSome;
      ++pos_;
      c.bound = var_list();
      if (accept_keyword("in")) {
        expect(Tok::LBrack, "'[' opening range array");
        c.range = array_term_vars();
      } else {
        c.range = c.bound;
      }
      expect(Tok::Semi, "';' after quantified term");
      c.items.push_back(cond_or());
      return c;
    }
    if (accept(Tok::LParen)) {
      Condition c = condition();
      expect(Tok::RParen, "')'");
      return c;
    }
    Condition c;
    c.lhs = operand();
    if (is_compare(at().kind)) {
      c.kind = Condition::Kind::Compare;
      c.op = compare_op(at().kind);
      ++pos_;
      c.rhs = operand();
      return c;
    }
    if (c.lhs.kind != Operand::Kind::Call) fail("expected comparison operator");
    c.kind = Condition::Kind::Test;
    return c;
  }

  // Variables inside a bracketed array term; everything else is notation.
  std::vector<std::string> array_term_vars() {
    std::vector<std::string> vs;
    int depth = 1;
    while (depth > 0) {
      const Token& t = at();
      if (t.kind == Tok::End) fail("unterminated array term");
      if (t.kind == Tok::LBrack) ++depth;
      if (t.kind == Tok::RBrack) --depth;
      if (t.kind == Tok::Var && std::find(vs.begin(), vs.end(), t.text) == vs.end()) vs.push_back(t.text);
      ++pos_;
    }
    if (vs.empty()) fail("array term binds no variable");
    return vs;
  }

  Operand operand() {
    Operand o;
    const Token& t = at();
    switch (t.kind) {
      case Tok::String:
      case Tok::Number:
        ++pos_;
        o.literal = literal_value(t);
        return o;
      case Tok::Var:
        ++pos_;
        o.kind = Operand::Kind::Variable;
        o.name = t.text;
        while (accept(Tok::Dot)) {
          o.kind = Operand::Kind::Field;
          o.fields.push_back(expect(Tok::String, "quoted field name after '.'").text);
        }
        return o;
      case Tok::LBrack:
        ++pos_;
        o.kind = Operand::Kind::ArrayTerm;
        o.vars = array_term_vars();
        return o;
      case Tok::Ident:
        if (at_literal_keyword()) {
          ++pos_;
          o.literal = literal_value(t);
          return o;
        }
        if (check(Tok::LBrack, 1)) {
          o.kind = Operand::Kind::Call;
          o.name = t.text;
          pos_ += 2;
          Operand arr;
          arr.kind = Operand::Kind::ArrayTerm;
          arr.vars = array_term_vars();
          o.args.push_back(std::move(arr));
          return o;
        }
        if (check(Tok::LParen, 1)) {
          o.kind = Operand::Kind::Call;
          o.name = t.text;
          pos_ += 2;
          if (!accept(Tok::RParen)) {
            do {
              o.args.push_back(operand());
            } while (accept(Tok::Comma));
            expect(Tok::RParen, "')' closing call");
          }
          return o;
        }
        fail("expected operand (variables are written with '$')");
      default: fail("expected operand");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void validate(const QueryAst& q) {
  std::set<std::string> bound;
  for (const Source& s : q.sources) {
    for (const std::string& v : pattern_variables(s.pattern)) {
      if (!bound.insert(v).second) {
        throw Error(ErrorKind::Query, "variable $" + v + " is bound more than once in the extraction patterns");
      }
    }
  }
  for (const std::string& v : construction_variables(q.construct)) {
    if (!bound.count(v)) throw Error(ErrorKind::Query, "unbound variable $" + v + " in construct clause");
  }
  if (q.where) {
    for (const std::string& v : condition_variables(*q.where)) {
      if (!bound.count(v)) throw Error(ErrorKind::Query, "unbound variable $" + v + " in where clause");
    }
  }
}

}  // namespace

QueryAst parse_query(std::string_view text) {
  QueryAst q = Parser(text).query();
  validate(q);
  return q;
}

ValuePattern parse_pattern(std::string_view text) { return Parser(text).pattern_only(); }
ConstructionPattern parse_construction(std::string_view text) { return Parser(text).construction_only(); }
Condition parse_condition(std::string_view text) { return Parser(text).condition_only(); }

Term derive_matching_term(const KeyValuePattern& p) {
  if (p.kind == KeyValuePattern::Kind::Option) {
    std::vector<Term> alts;
    bool any = false;
    for (const auto& a : p.alternatives) {
      alts.push_back(derive_matching_term(a));
      any = any || !alts.back().is_unit();
    }
    return any ? Term::option(std::move(alts)) : Term::unit();
  }
  std::vector<Term> parts;
  if (p.key_var) parts.push_back(Term::var(*p.key_var));
  parts.push_back(derive_matching_term(p.value.front()));
  return Term::tuple(std::move(parts));
}

Term derive_matching_term(const ValuePattern& p) {
  using K = ValuePattern::Kind;
  switch (p.kind) {
    case K::Variable: return Term::var(p.var);
    case K::Predicate:
    case K::Wildcard: return Term::unit();
    case K::Object: {
      std::vector<Term> parts;
      for (const auto& k : p.keys) parts.push_back(derive_matching_term(k));
      return Term::tuple(std::move(parts));
    }
    case K::Conjunction: {
      std::vector<Term> parts;
      for (const auto& i : p.items) parts.push_back(derive_matching_term(i));
      return Term::tuple(std::move(parts));
    }
    case K::Option: {
      std::vector<Term> alts;
      bool any = false;
      for (const auto& i : p.items) {
        alts.push_back(derive_matching_term(i));
        any = any || !alts.back().is_unit();
      }
      return any ? Term::option(std::move(alts)) : Term::unit();
    }
    case K::Array:
    case K::Descendants: {
      Term e = derive_matching_term(p.items.front());
      return e.is_unit() ? Term::unit() : Term::array(std::move(e));
    }
    case K::Children: {
      Term e = derive_matching_term(p.keys.front());
      return e.is_unit() ? Term::unit() : Term::array(std::move(e));
    }
  }
  return Term::unit();
}

Term source_term(const QueryAst& q) {
  std::vector<Term> parts;
  for (const Source& s : q.sources) parts.push_back(derive_matching_term(s.pattern));
  return Term::tuple(std::move(parts));
}

}  // namespace jpq
