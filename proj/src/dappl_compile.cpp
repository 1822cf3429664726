#include <sstream>

#include "meu/dappl.hpp"

namespace meu::dappl {

namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

class Compiler {
 public:
  Compiler(BddManager& mgr, CompiledDappl& out) : mgr_(mgr), out_(out) {}

  struct R {
    Bdd val, ok, rew;
    std::vector<VarId> all;  // reward variables that occur in the expression
  };

  R go(const ExprPtr& e) {
    switch (e->kind) {
      case Kind::ret: return leaf(pure(e->kids[0]));
      case Kind::flip: {
        VarId f = mgr_.new_var("f" + std::to_string(flips_++) + "_" + fmt_num(e->num));
        out_.weights.set(f, {e->num, 0}, {1 - e->num, 0});
        return leaf(mgr_.mk_var(f));
      }
      case Kind::reward: {
        R r = go(e->kids[0]);
        VarId v = mgr_.new_var("r" + std::to_string(rewards_++) + "_" + fmt_num(e->num));
        out_.weights.set(v, {1, e->num}, {1, 0});
        out_.reward_vars.push_back(v);
        r.rew = mgr_.and_(mgr_.mk_var(v), r.rew);
        r.all.push_back(v);
        return r;
      }
      case Kind::observe: {
        R r = go(e->kids[0]);
        r.ok = mgr_.and_(boolean(e->name, e->span), r.ok);
        return r;
      }
      case Kind::ite: {
        Bdd g = boolean(e->name, e->span);
        R t = go(e->kids[0]);
        R f = go(e->kids[1]);
        R r;
        r.val = mgr_.ite(g, t.val, f.val);
        r.ok = mgr_.ite(g, t.ok, f.ok);
        r.rew = mgr_.ite(g, mgr_.and_(t.rew, none_of(f.all)), mgr_.and_(f.rew, none_of(t.all)));
        r.all = t.all;
        r.all.insert(r.all.end(), f.all.begin(), f.all.end());
        return r;
      }
      case Kind::choose: {
        auto it = env_.find(e->name);
        if (it == env_.end() || !it->second.choice)
          input_error("choose on '" + e->name + "', which is not a choice", e->span);
        const Val& c = it->second;
        std::vector<R> arms;
        for (auto& a : e->arms) arms.push_back(go(a.body));
        R r = leaf(mgr_.mk_false());
        r.ok = mgr_.mk_false();
        r.rew = mgr_.mk_false();
        for (size_t i = 0; i < arms.size(); ++i) {
          Bdd ci = c.alts.at(e->arms[i].name);
          Bdd rew = arms[i].rew;
          for (size_t j = 0; j < arms.size(); ++j)
            if (j != i) rew = mgr_.and_(rew, none_of(arms[j].all));
          r.val = mgr_.or_(r.val, mgr_.and_(ci, arms[i].val));
          r.ok = mgr_.or_(r.ok, mgr_.and_(ci, arms[i].ok));
          r.rew = mgr_.or_(r.rew, mgr_.and_(ci, rew));
          r.all.insert(r.all.end(), arms[i].all.begin(), arms[i].all.end());
        }
        return r;
      }
      case Kind::bind: {
        const ExprPtr& e1 = e->kids[0];
        auto saved = env_.find(e->name) != env_.end() ? std::optional<Val>(env_[e->name]) : std::nullopt;
        R out;
        if (e1->kind == Kind::intro) {
          env_[e->name] = site(e1);
          out = go(e->kids[1]);
        } else {
          R r1 = go(e1);
          env_[e->name] = Val{false, r1.val, {}};
          R r2 = go(e->kids[1]);
          out.val = r2.val;
          out.ok = mgr_.and_(r1.ok, r2.ok);
          out.rew = mgr_.and_(r1.rew, r2.rew);
          out.all = r1.all;
          out.all.insert(out.all.end(), r2.all.begin(), r2.all.end());
        }
        if (saved) env_[e->name] = *saved; else env_.erase(e->name);
        return out;
      }
      case Kind::intro: input_error("unbound choice", e->span);
      default:
        if (is_pure(e->kind)) return leaf(pure(e));
        input_error("expression is not in core form: " + to_string(e), e->span);
    }
  }

 private:
  struct Val {
    bool choice = false;
    Bdd b;
    std::map<std::string, Bdd> alts;
  };

  R leaf(Bdd v) { return {v, mgr_.mk_true(), mgr_.mk_true(), {}}; }

  Bdd none_of(const std::vector<VarId>& rs) {
    Bdd out = mgr_.mk_true();
    for (VarId r : rs) out = mgr_.and_(out, mgr_.negate(mgr_.mk_var(r)));
    return out;
  }

  Bdd boolean(const std::string& x, Span s) {
    auto it = env_.find(x);
    if (it == env_.end()) input_error("unbound variable '" + x + "'", s);
    if (it->second.choice) input_error("'" + x + "' is a choice, not a Boolean", s);
    return it->second.b;
  }

  Bdd pure(const ExprPtr& e) {
    switch (e->kind) {
      case Kind::var: return boolean(e->name, e->span);
      case Kind::tt: return mgr_.mk_true();
      case Kind::ff: return mgr_.mk_false();
      case Kind::not_: return mgr_.negate(pure(e->kids[0]));
      case Kind::and_: return mgr_.and_(pure(e->kids[0]), pure(e->kids[1]));
      case Kind::or_: return mgr_.or_(pure(e->kids[0]), pure(e->kids[1]));
      default: input_error("expected a Boolean expression", e->span);
    }
  }

  Val site(const ExprPtr& intro) {
    SiteVars sv;
    sv.label = intro->site;
    sv.names = intro->names;
    Val v;
    v.choice = true;
    for (auto& n : intro->names) {
      VarId c = mgr_.new_var(intro->site + "." + n);
      out_.weights.set(c, {1, 0}, {1, 0});
      sv.vars.push_back(c);
      v.alts[n] = mgr_.mk_var(c);
    }
    out_.choices = mgr_.and_(out_.choices, mgr_.exactly_one(sv.vars));
    out_.sites.push_back(std::move(sv));
    return v;
  }

  BddManager& mgr_;
  CompiledDappl& out_;
  std::map<std::string, Val> env_;
  int flips_ = 0, rewards_ = 0;
};

}  // namespace

CompiledDappl compile(BddManager& mgr, const ExprPtr& core) {
  CompiledDappl out;
  out.choices = mgr.mk_true();
  Compiler c(mgr, out);
  Compiler::R r = c.go(core);
  out.value = r.val;
  out.gamma = r.ok;
  out.rewards = r.rew;
  return out;
}

Bbir<ExpectationSemiring> finalize(BddManager& mgr, const CompiledDappl& c) {
  Bbir<ExpectationSemiring> b;
  Bdd den = mgr.and_(c.gamma, c.rewards);
  b.formulas = {mgr.and_(mgr.and_(c.value, den), c.choices), den};
  for (auto& s : c.sites) b.branch_vars.insert(b.branch_vars.end(), s.vars.begin(), s.vars.end());
  b.weights = c.weights;
  return b;
}

std::vector<std::vector<VarId>> site_groups(const CompiledDappl& c) {
  std::vector<std::vector<VarId>> out;
  for (auto& s : c.sites) out.push_back(s.vars);
  return out;
}

Policy policy_of(const CompiledDappl& c, const PartialPolicy& total) {
  Policy out;
  for (const Literal& l : total) {
    if (!l.positive) continue;
    for (auto& s : c.sites)
      for (size_t i = 0; i < s.vars.size(); ++i)
        if (s.vars[i] == l.var) out[s.label] = s.names[i];
  }
  return out;
}

PartialPolicy literals_of(const CompiledDappl& c, const Policy& policy) {
  PartialPolicy out;
  for (auto& s : c.sites) {
    auto it = policy.find(s.label);
    if (it == policy.end()) input_error("policy has no entry for site " + s.label);
    bool found = false;
    for (size_t i = 0; i < s.vars.size(); ++i) {
      bool pick = s.names[i] == it->second;
      found |= pick;
      out.push_back({s.vars[i], pick});
    }
    if (!found) input_error("site " + s.label + " has no alternative '" + it->second + "'");
  }
  return out;
}

MeuSolution solve_meu(const std::string& source, const SolveOptions& opt) {
  ExprPtr core = desugar(parse(source));
  BddManager mgr(opt.order);
  CompiledDappl c = compile(mgr, core);
  Bbir<ExpectationSemiring> b = finalize(mgr, c);
  MeuObjective obj(mgr, b, site_groups(c));
  auto res = bb(obj, opt.bb);
  MeuSolution out;
  out.value = res.value;
  out.policy = policy_of(c, res.witness);
  out.stats = res.stats;
  out.feasible = res.feasible;
  if (opt.want_dot) out.dot = mgr.to_dot({{"phi", b.formulas[0]}, {"gamma", b.formulas[1]}});
  return out;
}

}  // namespace meu::dappl
