#include <cmath>
#include <set>
#include <sstream>

#include "lexer.hpp"
#include "meu/dappl.hpp"

namespace meu::dappl {

ExprPtr mk(Kind k, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = s;
  return e;
}

ExprPtr mk_var(const std::string& x, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::var;
  e->name = x;
  e->span = s;
  return e;
}

ExprPtr mk_ret(ExprPtr p, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::ret;
  e->span = s;
  e->kids = {std::move(p)};
  return e;
}

ExprPtr mk_flip(double theta, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::flip;
  e->num = theta;
  e->span = s;
  return e;
}

ExprPtr mk_reward(double k, ExprPtr body, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::reward;
  e->num = k;
  e->span = s;
  e->kids = {std::move(body)};
  return e;
}

ExprPtr mk_bind(const std::string& x, ExprPtr e1, ExprPtr e2, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::bind;
  e->name = x;
  e->span = s;
  e->kids = {std::move(e1), std::move(e2)};
  return e;
}

ExprPtr mk_ite(ExprPtr g, ExprPtr t, ExprPtr f, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::ite;
  e->span = s;
  e->kids = {std::move(g), std::move(t), std::move(f)};
  return e;
}

ExprPtr mk_observe(ExprPtr g, ExprPtr body, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::observe;
  e->span = s;
  e->kids = {std::move(g), std::move(body)};
  return e;
}

ExprPtr mk_unary(Kind k, ExprPtr a, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = s;
  e->kids = {std::move(a)};
  return e;
}

ExprPtr mk_binary(Kind k, ExprPtr a, ExprPtr b, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = s;
  e->kids = {std::move(a), std::move(b)};
  return e;
}

bool is_pure(Kind k) {
  return k == Kind::var || k == Kind::tt || k == Kind::ff || k == Kind::and_ || k == Kind::or_ ||
         k == Kind::not_;
}

static std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

static void print(std::ostream& os, const ExprPtr& e) {
  switch (e->kind) {
    case Kind::var: os << e->name; return;
    case Kind::tt: os << "tt"; return;
    case Kind::ff: os << "ff"; return;
    case Kind::not_: os << "!"; print(os, e->kids[0]); return;
    case Kind::and_:
    case Kind::or_:
      os << "(";
      print(os, e->kids[0]);
      os << (e->kind == Kind::and_ ? " && " : " || ");
      print(os, e->kids[1]);
      os << ")";
      return;
    case Kind::ret: os << "return "; print(os, e->kids[0]); return;
    case Kind::flip: os << "flip " << num(e->num); return;
    case Kind::reward: os << "reward " << num(e->num) << " ("; print(os, e->kids[0]); os << ")"; return;
    case Kind::ite:
      os << "(if ";
      if (e->name.empty()) print(os, e->kids[0]); else os << e->name;
      os << " then ";
      print(os, e->kids[e->name.empty() ? 1 : 0]);
      os << " else ";
      print(os, e->kids[e->name.empty() ? 2 : 1]);
      os << ")";
      return;
    case Kind::observe:
      os << "observe ";
      if (e->name.empty()) print(os, e->kids[0]); else os << e->name;
      os << " (";
      print(os, e->kids.back());
      os << ")";
      return;
    case Kind::bind:
      os << e->name << " <- ";
      print(os, e->kids[0]);
      os << "; ";
      print(os, e->kids[1]);
      return;
    case Kind::intro: {
      os << "[";
      for (size_t i = 0; i < e->names.size(); ++i) os << (i ? ", " : "") << e->names[i];
      os << "]";
      if (!e->site.empty()) os << "@" << e->site;
      return;
    }
    case Kind::choose:
      os << "(choose ";
      if (e->name.empty()) print(os, e->kids[0]); else os << e->name;
      for (auto& a : e->arms) {
        os << " | " << a.name << " -> ";
        print(os, a.body);
      }
      os << ")";
      return;
    case Kind::disc:
      os << "disc[";
      for (size_t i = 0; i < e->names.size(); ++i) os << (i ? ", " : "") << e->names[i] << ":" << num(e->probs[i]);
      os << "]";
      return;
    case Kind::loop: os << "loop " << e->count << " {"; print(os, e->kids[0]); os << "}"; return;
  }
}

std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

namespace {

const std::set<std::string> keywords = {"if",   "then", "else", "choose", "with", "observe", "reward", "loop",
                                        "return", "flip", "disc", "tt",     "ff",   "true",    "false"};

class Parser {
 public:
  explicit Parser(const std::string& src) : ts_(lex(src)) {}

  ExprPtr program() {
    ExprPtr e = seq();
    if (!ts_.at_end()) ts_.fail("unexpected token");
    return e;
  }

 private:
  bool at_seq_end() const { return ts_.at_end() || ts_.is("}") || ts_.is(")"); }

  ExprPtr seq() {
    Span s = ts_.peek().span;
    if (ts_.peek().type == Token::ident && ts_.is("<-", 1)) {
      std::string x = ts_.next().text;
      if (keywords.count(x)) input_error("'" + x + "' is a keyword", s);
      ts_.next();
      ExprPtr e1 = unit();
      ts_.expect(";");
      return mk_bind(x, e1, seq(), s);
    }
    ExprPtr e = unit();
    if (ts_.accept(";")) {
      if (at_seq_end()) return e;
      return mk_bind("_", e, seq(), s);
    }
    return e;
  }

  bool starts_continuation() const {
    static const std::set<std::string> starters = {"return", "flip", "reward", "if",  "choose",
                                                   "observe", "loop", "disc", "(", "{"};
    const Token& t = ts_.peek();
    return (t.type == Token::ident || t.type == Token::sym) && starters.count(t.text);
  }

  ExprPtr continuation() { return starts_continuation() ? unit() : mk_ret(mk(Kind::tt)); }

  double probability(const char* what) {
    Span s = ts_.peek().span;
    bool paren = ts_.accept("(");
    double p = ts_.expect_number();
    if (paren) ts_.expect(")");
    if (!(p >= 0 && p <= 1)) input_error(std::string(what) + " " + num(p) + " is outside [0, 1]", s);
    return p;
  }

  ExprPtr unit() {
    Span s = ts_.peek().span;
    if (ts_.accept("if")) {
      ExprPtr g = or_expr();
      ts_.expect("then");
      ExprPtr t = unit();
      ts_.expect("else");
      return mk_ite(g, t, unit(), s);
    }
    if (ts_.accept("choose")) {
      auto e = std::make_shared<Expr>();
      e->kind = Kind::choose;
      e->span = s;
      e->kids = {ts_.is("disc") ? disc() : or_expr()};
      ts_.accept("with");
      ts_.accept("|");
      std::set<std::string> seen;
      do {
        Span as = ts_.peek().span;
        std::string name = ts_.expect_ident();
        if (!seen.insert(name).second) input_error("duplicate arm '" + name + "'", as);
        if (!ts_.accept("->")) ts_.expect("=>");
        e->arms.push_back({name, unit()});
      } while (ts_.accept("|"));
      return e;
    }
    if (ts_.accept("observe")) {
      ExprPtr g = or_expr();
      return mk_observe(g, continuation(), s);
    }
    if (ts_.accept("reward")) {
      double k = ts_.expect_number();
      if (!std::isfinite(k)) input_error("reward must be finite", s);
      return mk_reward(k, continuation(), s);
    }
    if (ts_.accept("loop")) {
      Span ns = ts_.peek().span;
      double n = ts_.expect_number();
      if (n != std::floor(n)) input_error("loop bound must be an integer", ns);
      if (n < 1) input_error("loop bound must be at least 1", ns);
      ts_.expect("{");
      auto e = std::make_shared<Expr>();
      e->kind = Kind::loop;
      e->span = s;
      e->count = static_cast<int>(n);
      e->kids = {seq()};
      ts_.expect("}");
      return e;
    }
    if (ts_.accept("return")) return mk_ret(or_expr(), s);
    if (ts_.accept("flip")) return mk_flip(probability("flip bias"), s);
    if (ts_.is("disc")) return disc();
    return or_expr();
  }

  ExprPtr disc() {
    Span s = ts_.expect("disc").span;
    auto e = std::make_shared<Expr>();
    e->kind = Kind::disc;
    e->span = s;
    ts_.expect("[");
    std::set<std::string> seen;
    do {
      Span as = ts_.peek().span;
      std::string a = ts_.expect_ident();
      if (!seen.insert(a).second) input_error("duplicate outcome '" + a + "'", as);
      ts_.expect(":");
      e->names.push_back(a);
      e->probs.push_back(probability("probability"));
    } while (ts_.accept(","));
    ts_.expect("]");
    return e;
  }

  ExprPtr or_expr() {
    ExprPtr a = and_expr();
    while (ts_.is("||")) {
      Span s = ts_.next().span;
      a = mk_binary(Kind::or_, a, and_expr(), s);
    }
    return a;
  }

  ExprPtr and_expr() {
    ExprPtr a = not_expr();
    while (ts_.is("&&")) {
      Span s = ts_.next().span;
      a = mk_binary(Kind::and_, a, not_expr(), s);
    }
    return a;
  }

  ExprPtr not_expr() {
    if (ts_.is("!")) {
      Span s = ts_.next().span;
      return mk_unary(Kind::not_, not_expr(), s);
    }
    return atom();
  }

  ExprPtr atom() {
    const Token& t = ts_.peek();
    Span s = t.span;
    if (ts_.accept("(")) {
      if (ts_.accept(")")) return mk_ret(mk(Kind::tt, s), s);
      ExprPtr e = seq();
      ts_.expect(")");
      return e;
    }
    if (ts_.accept("{")) {
      ExprPtr e = seq();
      ts_.expect("}");
      return e;
    }
    if (ts_.accept("[")) {
      auto e = std::make_shared<Expr>();
      e->kind = Kind::intro;
      e->span = s;
      std::set<std::string> seen;
      do {
        Span as = ts_.peek().span;
        std::string a = ts_.expect_ident();
        if (!seen.insert(a).second) input_error("duplicate alternative '" + a + "'", as);
        e->names.push_back(a);
      } while (ts_.accept(","));
      ts_.expect("]");
      return e;
    }
    if (t.type == Token::ident) {
      if (t.text == "tt" || t.text == "true") return ts_.next(), mk(Kind::tt, s);
      if (t.text == "ff" || t.text == "false") return ts_.next(), mk(Kind::ff, s);
      if (keywords.count(t.text)) ts_.fail("unexpected keyword");
      return mk_var(ts_.next().text, s);
    }
    ts_.fail("expected an expression");
  }

  TokenStream ts_;
};

}  // namespace

ExprPtr parse(const std::string& source) { return Parser(source).program(); }

}  // namespace meu::dappl
