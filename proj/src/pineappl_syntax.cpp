#include <cmath>
#include <set>
#include <sstream>

#include "lexer.hpp"
#include "meu/pineappl.hpp"

namespace meu::pineappl {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void print(std::ostream& os, const PExprPtr& e, bool top) {
  switch (e->kind) {
    case EKind::var: os << e->name; return;
    case EKind::tt: os << "tt"; return;
    case EKind::ff: os << "ff"; return;
    case EKind::is: os << e->name << " is " << e->alt; return;
    case EKind::not_: os << "!"; print(os, e->kids[0], false); return;
    case EKind::and_:
    case EKind::or_:
      if (!top) os << "(";
      print(os, e->kids[0], false);
      os << (e->kind == EKind::and_ ? " && " : " || ");
      print(os, e->kids[1], false);
      if (!top) os << ")";
      return;
  }
}

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
  return s;
}

void print_stmts(std::ostream& os, const std::vector<Stmt>& body, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  for (const Stmt& s : body) {
    switch (s.kind) {
      case SKind::assign: os << pad << s.targets[0] << " = " << to_string(s.expr) << ";\n"; break;
      case SKind::flip: os << pad << s.targets[0] << " = flip " << num(s.theta) << ";\n"; break;
      case SKind::disc: {
        os << pad << s.targets[0] << " = disc[";
        for (size_t i = 0; i < s.alts.size(); ++i) os << (i ? ", " : "") << s.alts[i] << ": " << num(s.probs[i]);
        os << "];\n";
        break;
      }
      case SKind::mmap:
        os << pad << "(" << join(s.targets) << ") = mmap(" << join(s.args) << ")";
        if (s.evidence) os << " with { " << to_string(s.evidence) << " }";
        os << ";\n";
        break;
      case SKind::loop:
        os << pad << "loop " << s.count << " {\n";
        print_stmts(os, s.then_body, indent + 1);
        os << pad << "}\n";
        break;
      case SKind::if_:
        os << pad << "if " << to_string(s.expr) << " {\n";
        print_stmts(os, s.then_body, indent + 1);
        os << pad << "} else {\n";
        print_stmts(os, s.else_body, indent + 1);
        os << pad << "}\n";
        break;
    }
  }
}

const std::set<std::string> keywords = {"if", "else", "loop", "flip", "disc", "mmap", "with",
                                        "pr", "is",   "tt",   "ff",   "true", "false"};

class Parser {
 public:
  explicit Parser(const std::string& src) : ts_(lex(src)) {}

  Program program() {
    Program p;
    while (!ts_.at_end() && !at_query()) p.body.push_back(stmt());
    while (!ts_.at_end()) {
      if (!at_query()) ts_.fail("expected a query (pr or mmap)");
      p.queries.push_back(query());
      ts_.accept(";");
    }
    if (p.queries.empty()) input_error("program has no query", ts_.peek().span);
    return p;
  }

 private:
  bool at_query() const { return (ts_.is("pr") || ts_.is("mmap")) && ts_.is("(", 1); }

  std::string name() {
    Span s = ts_.peek().span;
    std::string x = ts_.expect_ident();
    if (keywords.count(x)) input_error("'" + x + "' is a keyword", s);
    return x;
  }

  std::vector<Stmt> block() {
    ts_.expect("{");
    std::vector<Stmt> out;
    while (!ts_.is("}")) {
      if (ts_.at_end()) ts_.fail("unterminated block");
      out.push_back(stmt());
    }
    ts_.expect("}");
    return out;
  }

  double probability() {
    Span s = ts_.peek().span;
    bool paren = ts_.accept("(");
    double p = ts_.expect_number();
    if (paren) ts_.expect(")");
    if (!(p >= 0 && p <= 1)) input_error("probability " + num(p) + " is outside [0, 1]", s);
    return p;
  }

  void mmap_tail(Stmt& s) {
    ts_.expect("mmap");
    ts_.expect("(");
    do s.args.push_back(name());
    while (ts_.accept(","));
    ts_.expect(")");
    if (ts_.accept("with")) {
      ts_.expect("{");
      s.evidence = expr();
      ts_.expect("}");
    }
    std::set<std::string> seen;
    for (auto& a : s.args)
      if (!seen.insert(a).second) input_error("'" + a + "' appears twice in mmap", s.span);
    if (s.targets.size() != s.args.size())
      input_error("mmap binds " + std::to_string(s.targets.size()) + " names but has " +
                      std::to_string(s.args.size()) + " arguments",
                  s.span);
  }

  Stmt stmt() {
    Stmt s;
    s.span = ts_.peek().span;
    if (ts_.accept("if")) {
      s.kind = SKind::if_;
      s.expr = expr();
      s.then_body = block();
      if (ts_.accept("else")) {
        if (ts_.is("if")) s.else_body.push_back(stmt());
        else s.else_body = block();
      }
      ts_.accept(";");
      return s;
    }
    if (ts_.accept("loop")) {
      s.kind = SKind::loop;
      Span ns = ts_.peek().span;
      double n = ts_.expect_number();
      if (n != std::floor(n)) input_error("loop bound must be an integer", ns);
      if (n < 1) input_error("loop bound must be at least 1", ns);
      s.count = static_cast<int>(n);
      s.then_body = block();
      ts_.accept(";");
      return s;
    }
    if (ts_.accept("(")) {
      s.kind = SKind::mmap;
      do s.targets.push_back(name());
      while (ts_.accept(","));
      ts_.expect(")");
      ts_.expect("=");
      mmap_tail(s);
      ts_.accept(";");
      return s;
    }
    s.targets = {name()};
    ts_.expect("=");
    if (ts_.is("mmap")) {
      s.kind = SKind::mmap;
      mmap_tail(s);
    } else if (ts_.accept("flip")) {
      s.kind = SKind::flip;
      s.theta = probability();
    } else if (ts_.accept("disc")) {
      s.kind = SKind::disc;
      ts_.expect("[");
      std::set<std::string> seen;
      do {
        Span as = ts_.peek().span;
        std::string a = ts_.expect_ident();
        if (!seen.insert(a).second) input_error("duplicate outcome '" + a + "'", as);
        ts_.expect(":");
        s.alts.push_back(a);
        s.probs.push_back(probability());
      } while (ts_.accept(","));
      ts_.expect("]");
      double sum = 0;
      for (double p : s.probs) sum += p;
      if (std::abs(sum - 1.0) > 1e-9) input_error("disc probabilities sum to " + num(sum), s.span);
    } else {
      s.kind = SKind::assign;
      s.expr = expr();
    }
    ts_.accept(";");
    return s;
  }

  Query query() {
    Query q;
    q.span = ts_.peek().span;
    if (ts_.accept("pr")) {
      q.kind = Query::pr;
      ts_.expect("(");
      q.expr = expr();
      ts_.expect(")");
    } else {
      q.kind = Query::mmap;
      ts_.expect("mmap");
      ts_.expect("(");
      do q.args.push_back(name());
      while (ts_.accept(","));
      ts_.expect(")");
    }
    if (ts_.accept("with")) {
      ts_.expect("{");
      q.evidence = expr();
      ts_.expect("}");
    }
    q.text = q.kind == Query::pr ? "pr(" + to_string(q.expr) + ")" : "mmap(" + join(q.args) + ")";
    if (q.evidence) q.text += " with {" + to_string(q.evidence) + "}";
    return q;
  }

  static PExprPtr node(EKind k, Span s, std::vector<PExprPtr> kids = {}) {
    auto e = std::make_shared<PExpr>();
    e->kind = k;
    e->span = s;
    e->kids = std::move(kids);
    return e;
  }

  PExprPtr expr() {
    PExprPtr a = conj();
    while (ts_.is("||")) {
      Span s = ts_.next().span;
      a = node(EKind::or_, s, {a, conj()});
    }
    return a;
  }

  PExprPtr conj() {
    PExprPtr a = neg();
    while (ts_.is("&&")) {
      Span s = ts_.next().span;
      a = node(EKind::and_, s, {a, neg()});
    }
    return a;
  }

  PExprPtr neg() {
    if (ts_.is("!")) {
      Span s = ts_.next().span;
      return node(EKind::not_, s, {neg()});
    }
    return atom();
  }

  PExprPtr atom() {
    Span s = ts_.peek().span;
    if (ts_.accept("(")) {
      PExprPtr e = expr();
      ts_.expect(")");
      return e;
    }
    if (ts_.accept("tt") || ts_.accept("true")) return node(EKind::tt, s);
    if (ts_.accept("ff") || ts_.accept("false")) return node(EKind::ff, s);
    auto e = std::make_shared<PExpr>();
    e->span = s;
    e->name = name();
    if (ts_.accept("is")) {
      e->kind = EKind::is;
      e->alt = ts_.expect_ident();
    } else {
      e->kind = EKind::var;
    }
    return e;
  }

  TokenStream ts_;
};

}  // namespace

std::string to_string(const PExprPtr& e) {
  std::ostringstream os;
  print(os, e, true);
  return os.str();
}

std::string to_string(const Program& p) {
  std::ostringstream os;
  print_stmts(os, p.body, 0);
  for (auto& q : p.queries) {
    if (q.kind == Query::pr) os << "pr(" << to_string(q.expr) << ")";
    else os << "mmap(" << join(q.args) << ")";
    if (q.evidence) os << " with {" << to_string(q.evidence) << "}";
    os << "\n";
  }
  return os.str();
}

Program parse(const std::string& source) { return Parser(source).program(); }

}  // namespace meu::pineappl
