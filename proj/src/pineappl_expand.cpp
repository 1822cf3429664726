#include <algorithm>
#include <set>

#include "meu/pineappl.hpp"

namespace meu::pineappl {

namespace {

PExprPtr node(EKind k, std::vector<PExprPtr> kids = {}, Span s = {}) {
  auto e = std::make_shared<PExpr>();
  e->kind = k;
  e->span = s;
  e->kids = std::move(kids);
  return e;
}

PExprPtr var(const std::string& x, Span s = {}) {
  auto e = std::make_shared<PExpr>();
  e->kind = EKind::var;
  e->name = x;
  e->span = s;
  return e;
}

Stmt assign(const std::string& x, PExprPtr e, Span s) {
  Stmt out;
  out.kind = SKind::assign;
  out.span = s;
  out.targets = {x};
  out.expr = std::move(e);
  return out;
}

std::string indicator(const std::string& x, const std::string& a) { return x + "__" + a; }

using Categoricals = std::map<std::string, std::vector<std::string>>;

PExprPtr desugar_expr(const PExprPtr& e, const Categoricals& cats) {
  switch (e->kind) {
    case EKind::is: {
      auto it = cats.find(e->name);
      if (it == cats.end()) input_error("'" + e->name + "' is not a discrete variable", e->span);
      if (std::find(it->second.begin(), it->second.end(), e->alt) == it->second.end())
        input_error("'" + e->name + "' has no outcome '" + e->alt + "'", e->span);
      return var(indicator(e->name, e->alt), e->span);
    }
    case EKind::var:
      if (cats.count(e->name)) input_error("'" + e->name + "' is discrete; test it with 'is'", e->span);
      return e;
    case EKind::tt:
    case EKind::ff: return e;
    default: {
      auto c = std::make_shared<PExpr>(*e);
      for (auto& k : c->kids) k = desugar_expr(k, cats);
      return c;
    }
  }
}

std::vector<Stmt> desugar_body(const std::vector<Stmt>& body, Categoricals& cats) {
  std::vector<Stmt> out;
  for (const Stmt& s : body) {
    switch (s.kind) {
      case SKind::disc: {
        const std::string& x = s.targets[0];
        const size_t n = s.alts.size();
        PExprPtr any_prev;
        double rem = 1.0;
        for (size_t i = 0; i < n; ++i) {
          std::string v = indicator(x, s.alts[i]);
          if (n == 1) {
            out.push_back(assign(v, node(EKind::tt), s.span));
          } else if (i == 0) {
            Stmt f;
            f.kind = SKind::flip;
            f.span = s.span;
            f.targets = {v};
            f.theta = s.probs[0];
            out.push_back(f);
          } else if (i + 1 == n) {
            out.push_back(assign(v, node(EKind::not_, {any_prev}), s.span));
          } else {
            Stmt f;
            f.kind = SKind::flip;
            f.span = s.span;
            f.targets = {indicator(x, "t" + std::to_string(i))};
            f.theta = rem > 1e-12 ? std::clamp(s.probs[i] / rem, 0.0, 1.0) : 0.0;
            out.push_back(f);
            out.push_back(assign(v, node(EKind::and_, {node(EKind::not_, {any_prev}), var(f.targets[0])}), s.span));
          }
          rem -= s.probs[i];
          any_prev = any_prev ? node(EKind::or_, {any_prev, var(v)}) : var(v);
        }
        cats[x] = s.alts;
        break;
      }
      case SKind::assign:
      case SKind::flip: {
        Stmt c = s;
        if (c.expr) c.expr = desugar_expr(c.expr, cats);
        cats.erase(s.targets[0]);
        out.push_back(c);
        break;
      }
      case SKind::mmap: {
        Stmt c = s;
        for (auto& a : c.args)
          if (cats.count(a)) input_error("mmap over discrete variable '" + a + "' is not supported", s.span);
        if (c.evidence) c.evidence = desugar_expr(c.evidence, cats);
        for (auto& t : c.targets) cats.erase(t);
        out.push_back(c);
        break;
      }
      case SKind::loop: {
        Stmt c = s;
        // The body may (re)declare discrete variables; two passes reach the
        // state seen by every later iteration.
        Categoricals once = cats;
        desugar_body(s.then_body, once);
        c.then_body = desugar_body(s.then_body, cats);
        if (cats != once) c.then_body = desugar_body(s.then_body, cats);
        out.push_back(c);
        break;
      }
      case SKind::if_: {
        Stmt c = s;
        c.expr = desugar_expr(s.expr, cats);
        Categoricals a = cats, b = cats;
        c.then_body = desugar_body(s.then_body, a);
        c.else_body = desugar_body(s.else_body, b);
        Categoricals merged;
        for (auto& [k, v] : a) {
          auto it = b.find(k);
          if (it != b.end() && it->second == v) merged[k] = v;
        }
        cats = merged;
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

// Renaming with fresh names. `used` is every name handed out so far.
struct Names {
  std::map<std::string, std::string> current;  // source name -> expanded name
  std::set<std::string> used;
  std::map<std::string, int> counter;
  std::set<std::string> mmap_bound;
};

class Expander {
 public:
  Program run(const Program& p) {
    Program out;
    Names n;
    out.body = body(p.body, n);
    for (const Query& q : p.queries) {
      Query c = q;
      if (c.expr) c.expr = rename(c.expr, n);
      if (c.evidence) {
        check_evidence(c.evidence, n, c.span);
        c.evidence = rename(c.evidence, n);
      }
      for (auto& a : c.args) a = lookup(a, n, c.span);
      out.queries.push_back(c);
    }
    return out;
  }

 private:
  static std::string fresh(const std::string& x, Names& n) {
    if (!n.used.count(x)) {
      n.used.insert(x);
      return x;
    }
    int& k = n.counter[x];
    std::string cand;
    do cand = x + std::to_string(k++);
    while (n.used.count(cand));
    n.used.insert(cand);
    return cand;
  }

  static std::string lookup(const std::string& x, const Names& n, Span s) {
    auto it = n.current.find(x);
    if (it == n.current.end()) input_error("undefined variable '" + x + "'", s);
    return it->second;
  }

  static void check_evidence(const PExprPtr& e, const Names& n, Span s) {
    if (e->kind == EKind::var) {
      auto it = n.current.find(e->name);
      if (it != n.current.end() && n.mmap_bound.count(it->second))
        input_error("evidence refers to '" + e->name + "', which is bound by mmap", s);
    }
    for (auto& k : e->kids) check_evidence(k, n, s);
  }

  static PExprPtr rename(const PExprPtr& e, const Names& n) {
    if (e->kind == EKind::var) {
      auto c = std::make_shared<PExpr>(*e);
      c->name = lookup(e->name, n, e->span);
      return c;
    }
    if (e->kind == EKind::is) input_error("discrete test survived desugaring", e->span);
    if (e->kids.empty()) return e;
    auto c = std::make_shared<PExpr>(*e);
    for (auto& k : c->kids) k = rename(k, n);
    return c;
  }

  std::vector<Stmt> body(const std::vector<Stmt>& in, Names& n) {
    std::vector<Stmt> out;
    for (const Stmt& s : in) stmt(s, n, out);
    return out;
  }

  void stmt(const Stmt& s, Names& n, std::vector<Stmt>& out) {
    switch (s.kind) {
      case SKind::disc: input_error("discrete sugar survived desugaring", s.span);
      case SKind::assign:
      case SKind::flip: {
        Stmt c = s;
        if (c.expr) c.expr = rename(c.expr, n);
        std::string x = fresh(s.targets[0], n);
        n.current[s.targets[0]] = x;
        n.mmap_bound.erase(x);
        c.targets = {x};
        out.push_back(c);
        return;
      }
      case SKind::mmap: {
        Stmt c = s;
        for (auto& a : c.args) a = lookup(a, n, s.span);
        if (c.evidence) {
          check_evidence(c.evidence, n, s.span);
          c.evidence = rename(c.evidence, n);
        }
        for (auto& t : c.targets) {
          std::string x = fresh(t, n);
          n.current[t] = x;
          n.mmap_bound.insert(x);
          t = x;
        }
        out.push_back(c);
        return;
      }
      case SKind::loop:
        for (int i = 0; i < s.count; ++i)
          for (const Stmt& b : s.then_body) stmt(b, n, out);
        return;
      case SKind::if_: {
        Stmt c = s;
        c.expr = rename(s.expr, n);
        // Both branches start from the same names, so a name bound in each
        // branch is one variable; the compiler muxes its two definitions.
        Names a = n, b = n;
        c.then_body = body(s.then_body, a);
        c.else_body = body(s.else_body, b);
        n.used = a.used;
        n.used.insert(b.used.begin(), b.used.end());
        for (auto& [k, v] : b.counter) n.counter[k] = std::max(a.counter[k], v);
        for (auto& [k, v] : a.counter) n.counter[k] = std::max(n.counter[k], v);
        n.mmap_bound = a.mmap_bound;
        n.mmap_bound.insert(b.mmap_bound.begin(), b.mmap_bound.end());
        out.push_back(c);
        std::map<std::string, std::string> next;
        for (auto& [src, va] : a.current) {
          auto it = b.current.find(src);
          if (it == b.current.end()) continue;  // local to the then branch
          const std::string& vb = it->second;
          if (va == vb) {
            next[src] = va;
            continue;
          }
          std::string j = fresh(src, n);
          PExprPtr g = c.expr;
          out.push_back(assign(j,
                               node(EKind::or_, {node(EKind::and_, {g, var(va)}),
                                                 node(EKind::and_, {node(EKind::not_, {g}), var(vb)})}),
                               s.span));
          if (n.mmap_bound.count(va) || n.mmap_bound.count(vb)) n.mmap_bound.insert(j);
          next[src] = j;
        }
        n.current = std::move(next);
        return;
      }
    }
  }
};

}  // namespace

Program desugar(const Program& p) {
  Categoricals cats;
  Program out;
  out.body = desugar_body(p.body, cats);
  for (const Query& q : p.queries) {
    Query c = q;
    if (c.expr) c.expr = desugar_expr(c.expr, cats);
    if (c.evidence) c.evidence = desugar_expr(c.evidence, cats);
    for (auto& a : c.args)
      if (cats.count(a)) input_error("mmap over discrete variable '" + a + "' is not supported", c.span);
    out.queries.push_back(c);
  }
  return out;
}

Program expand(const Program& p) { return Expander().run(p); }

}  // namespace meu::pineappl
