#include <algorithm>
#include <set>

#include "meu/pineappl.hpp"

namespace meu::pineappl {

namespace {

class StagedCompiler {
 public:
  StagedCompiler(BddManager& mgr, const RunOptions& opt, Outcome* out) : mgr_(mgr), opt_(opt), out_(out) {}

  void body(const std::vector<Stmt>& stmts, CompileState& st) {
    for (const Stmt& s : stmts) stmt(s, st);
  }

  Bdd expr(const PExprPtr& e, const CompileState& st) {
    switch (e->kind) {
      case EKind::var: {
        auto it = st.vars.find(e->name);
        if (it == st.vars.end()) input_error("undefined variable '" + e->name + "'", e->span);
        return mgr_.mk_var(it->second);
      }
      case EKind::tt: return mgr_.mk_true();
      case EKind::ff: return mgr_.mk_false();
      case EKind::not_: return mgr_.negate(expr(e->kids[0], st));
      case EKind::and_: return mgr_.and_(expr(e->kids[0], st), expr(e->kids[1], st));
      case EKind::or_: return mgr_.or_(expr(e->kids[0], st), expr(e->kids[1], st));
      case EKind::is: input_error("discrete test survived desugaring", e->span);
    }
    return mgr_.mk_false();
  }

  // argmax over the arguments of Pr[args | evidence] under the current state.
  MmapResult solve(const std::vector<std::string>& args, const PExprPtr& evidence, const CompileState& st,
                   Span span) {
    Bbir<RealSemiring> b;
    Bdd f = st.constraint;
    if (evidence) f = mgr_.and_(f, expr(evidence, st));
    b.formulas = {f};
    for (auto& a : args) {
      auto it = st.vars.find(a);
      if (it == st.vars.end()) input_error("mmap over undefined variable '" + a + "'", span);
      b.branch_vars.push_back(it->second);
    }
    b.weights = st.weights;
    MmapObjective obj(mgr_, b);
    auto res = bb(obj, opt_.bb);
    if (out_) {
      BbStats& acc = out_->stats;
      acc.nodes_created += res.stats.nodes_created;
      acc.bound_calls += res.stats.bound_calls;
      acc.prunes += res.stats.prunes;
      acc.base_cases += res.stats.base_cases;
      acc.infeasible += res.stats.infeasible;
      acc.elapsed_ms += res.stats.elapsed_ms;
      acc.timed_out |= res.stats.timed_out;
    }
    if (res.stats.timed_out) solve_error("mmap search timed out");
    MmapResult r;
    r.posterior = res.value;
    for (size_t i = 0; i < args.size(); ++i) {
      bool v = false;
      for (auto& l : res.witness)
        if (l.var == b.branch_vars[i]) v = l.positive;
      r.assignment.push_back({args[i], v});
    }
    return r;
  }

 private:
  VarId program_var(const std::string& x, CompileState& st, Span s) {
    if (st.vars.count(x)) input_error("'" + x + "' is bound twice", s);
    VarId v;
    if (registered_.count(x)) v = *mgr_.find_var(x);  // same name bound in the sibling branch
    else v = mgr_.new_var(x), registered_.insert(x);
    st.vars[x] = v;
    if (!st.weights.has(v)) st.weights.set(v, 1, 1);
    return v;
  }

  void define(VarId x, Bdd phi, CompileState& st) {
    st.defs.push_back({x, phi});
    st.constraint = mgr_.and_(st.constraint, mgr_.iff(mgr_.mk_var(x), phi));
  }

  void stmt(const Stmt& s, CompileState& st) {
    switch (s.kind) {
      case SKind::flip: {
        VarId x = program_var(s.targets[0], st, s.span);
        VarId f = mgr_.new_var(s.targets[0] + "~f" + std::to_string(aux_++));
        st.weights.set(f, s.theta, 1 - s.theta);
        define(x, mgr_.mk_var(f), st);
        return;
      }
      case SKind::assign: {
        Bdd phi = expr(s.expr, st);
        define(program_var(s.targets[0], st, s.span), phi, st);
        return;
      }
      case SKind::mmap: {
        MmapResult r = solve(s.args, s.evidence, st, s.span);
        MmapResult staged;
        staged.posterior = r.posterior;
        for (size_t i = 0; i < s.targets.size(); ++i) {
          bool a = r.assignment[i].second;
          VarId m = program_var(s.targets[i], st, s.span);
          VarId k = mgr_.new_var(s.targets[i] + "~k" + std::to_string(aux_++));
          st.weights.set(k, a ? 1.0 : 0.0, a ? 0.0 : 1.0);
          define(m, mgr_.mk_var(k), st);
          staged.assignment.push_back({s.targets[i], a});
        }
        if (out_) out_->staged.push_back(staged);
        return;
      }
      case SKind::if_: {
        Bdd g = expr(s.expr, st);
        CompileState a = st, b = st;
        size_t base = st.defs.size();
        body(s.then_body, a);
        body(s.else_body, b);
        std::map<VarId, Bdd> then_defs, else_defs;
        std::vector<VarId> order;
        for (size_t i = base; i < a.defs.size(); ++i) {
          then_defs[a.defs[i].first] = a.defs[i].second;
          order.push_back(a.defs[i].first);
        }
        for (size_t i = base; i < b.defs.size(); ++i) {
          if (!then_defs.count(b.defs[i].first)) order.push_back(b.defs[i].first);
          else_defs[b.defs[i].first] = b.defs[i].second;
        }
        st.weights.merge(a.weights);
        st.weights.merge(b.weights);
        for (auto& [name, v] : a.vars) st.vars[name] = v;
        for (auto& [name, v] : b.vars) st.vars[name] = v;
        for (VarId x : order) {
          auto t = then_defs.find(x);
          auto e = else_defs.find(x);
          Bdd phi;
          if (t != then_defs.end() && e != else_defs.end()) phi = mgr_.ite(g, t->second, e->second);
          else phi = t != then_defs.end() ? t->second : e->second;  // local to one branch
          define(x, phi, st);
        }
        return;
      }
      case SKind::loop:
      case SKind::disc: input_error("sugar survived expansion", s.span);
    }
  }

  BddManager& mgr_;
  const RunOptions& opt_;
  Outcome* out_;
  int aux_ = 0;
  std::set<std::string> registered_;
};

}  // namespace

CompileState compile_program(BddManager& mgr, const Program& expanded, const RunOptions& opt, Outcome* out) {
  CompileState st;
  st.constraint = mgr.mk_true();
  StagedCompiler c(mgr, opt, out);
  c.body(expanded.body, st);
  return st;
}

Outcome run(const Program& expanded, const RunOptions& opt) {
  Outcome out;
  BddManager mgr(opt.order);
  CompileState st = compile_program(mgr, expanded, opt, &out);
  out.constraint_nodes = mgr.size(st.constraint);
  StagedCompiler c(mgr, opt, &out);
  for (const Query& q : expanded.queries) {
    if (q.kind == Query::mmap) {
      if (&q != &expanded.queries.back()) input_error("an mmap query must come last", q.span);
      out.terminal = c.solve(q.args, q.evidence, st, q.span);
      continue;
    }
    Bdd psi = q.evidence ? c.expr(q.evidence, st) : mgr.mk_true();
    Bdd den_f = mgr.and_(st.constraint, psi);
    double den = mgr.amc(den_f, st.weights);
    if (den <= 0) solve_error("evidence of " + q.text + " has probability zero");
    double num = mgr.amc(mgr.and_(den_f, c.expr(q.expr, st)), st.weights);
    out.queries.push_back({q.text, num / den});
  }
  if (opt.want_dot) out.dot = mgr.to_dot({{"constraint", st.constraint}});
  return out;
}

Outcome run(const std::string& source, const RunOptions& opt) { return run(expand(desugar(parse(source))), opt); }

}  // namespace meu::pineappl
