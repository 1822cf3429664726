#include "meu/oracle.hpp"

#include <cmath>

namespace meu::oracle {

FormulaPtr f_var(int v) {
  auto f = std::make_shared<Formula>();
  f->op = Formula::var;
  f->v = v;
  return f;
}

FormulaPtr f_const(bool b) {
  auto f = std::make_shared<Formula>();
  f->op = b ? Formula::tt : Formula::ff;
  return f;
}

static FormulaPtr node(Formula::Op op, std::vector<FormulaPtr> kids) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->kids = std::move(kids);
  return f;
}

FormulaPtr f_not(FormulaPtr a) { return node(Formula::not_, {std::move(a)}); }
FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return node(Formula::and_, {std::move(a), std::move(b)}); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return node(Formula::or_, {std::move(a), std::move(b)}); }
FormulaPtr f_xor(FormulaPtr a, FormulaPtr b) { return node(Formula::xor_, {std::move(a), std::move(b)}); }
FormulaPtr f_iff(FormulaPtr a, FormulaPtr b) { return node(Formula::iff, {std::move(a), std::move(b)}); }

bool eval(const FormulaPtr& f, const std::vector<bool>& a) {
  switch (f->op) {
    case Formula::var: return a.at(f->v);
    case Formula::tt: return true;
    case Formula::ff: return false;
    case Formula::not_: return !eval(f->kids[0], a);
    case Formula::and_: return eval(f->kids[0], a) && eval(f->kids[1], a);
    case Formula::or_: return eval(f->kids[0], a) || eval(f->kids[1], a);
    case Formula::xor_: return eval(f->kids[0], a) != eval(f->kids[1], a);
    case Formula::iff: return eval(f->kids[0], a) == eval(f->kids[1], a);
  }
  return false;
}

MmapAnswer mmap_enum(const FormulaPtr& phi, const std::vector<int>& m,
                     const std::vector<LitWeights<RealSemiring>>& weights,
                     const FormulaPtr& evidence, const std::vector<int>& universe) {
  if (m.size() > 14) throw Error(ErrorKind::usage, "mmap_enum: too many MAP variables");
  if (universe.size() > 20) throw Error(ErrorKind::usage, "mmap_enum: universe too large");
  std::vector<double> mass(size_t{1} << m.size(), 0.0);
  std::vector<bool> a(weights.size(), false);
  for (uint64_t bits = 0; bits < (uint64_t{1} << universe.size()); ++bits) {
    for (size_t i = 0; i < universe.size(); ++i) a[universe[i]] = (bits >> i) & 1;
    if (!eval(phi, a) || !eval(evidence, a)) continue;
    double w = 1.0;
    for (int v : universe) w *= a[v] ? weights[v].pos : weights[v].neg;
    size_t idx = 0;
    for (int v : m) idx = (idx << 1) | (a[v] ? 1 : 0);
    mass[idx] += w;
  }
  double z = 0;
  for (double x : mass) z += x;
  if (z <= 0) solve_error("evidence has probability zero");
  MmapAnswer best;
  best.value = neg_inf;
  for (size_t idx = 0; idx < mass.size(); ++idx) {
    double v = mass[idx] / z;
    if (v > best.value + 1e-9) {
      best.value = v;
      best.assignment.assign(m.size(), false);
      for (size_t j = 0; j < m.size(); ++j) best.assignment[j] = (idx >> (m.size() - 1 - j)) & 1;
    }
  }
  return best;
}

using dappl::Kind;

static bool eval_pure(const dappl::ExprPtr& e, const std::map<std::string, bool>& env) {
  switch (e->kind) {
    case Kind::var: {
      auto it = env.find(e->name);
      if (it == env.end()) input_error("unbound variable '" + e->name + "'", e->span);
      return it->second;
    }
    case Kind::tt: return true;
    case Kind::ff: return false;
    case Kind::not_: return !eval_pure(e->kids[0], env);
    case Kind::and_: return eval_pure(e->kids[0], env) && eval_pure(e->kids[1], env);
    case Kind::or_: return eval_pure(e->kids[0], env) || eval_pure(e->kids[1], env);
    default: input_error("expected a Boolean expression", e->span);
  }
}

static bool lookup(const std::map<std::string, bool>& env, const std::string& x, Span s) {
  auto it = env.find(x);
  if (it == env.end()) input_error("unbound variable '" + x + "'", s);
  return it->second;
}

UtilDist util_eval(const dappl::ExprPtr& e, const std::map<std::string, bool>& env) {
  UtilDist d;
  switch (e->kind) {
    case Kind::var: case Kind::tt: case Kind::ff: case Kind::not_: case Kind::and_: case Kind::or_:
    case Kind::ret:
      d.outcomes[{eval_pure(e->kind == Kind::ret ? e->kids[0] : e, env), 0.0}] = 1.0;
      return d;
    case Kind::flip:
      if (e->num > 0) d.outcomes[{true, 0.0}] += e->num;
      if (e->num < 1) d.outcomes[{false, 0.0}] += 1.0 - e->num;
      return d;
    case Kind::reward: {
      UtilDist in = util_eval(e->kids[0], env);
      for (auto& [k, p] : in.outcomes) d.outcomes[{k.first, k.second + e->num}] += p;
      d.bottom = in.bottom;
      return d;
    }
    case Kind::ite:
      return util_eval(lookup(env, e->name, e->span) ? e->kids[0] : e->kids[1], env);
    case Kind::observe:
      if (lookup(env, e->name, e->span)) return util_eval(e->kids[0], env);
      d.bottom = 1.0;
      return d;
    case Kind::bind: {
      UtilDist first = util_eval(e->kids[0], env);
      d.bottom = first.bottom;
      for (auto& [k, p] : first.outcomes) {
        if (p == 0) continue;
        auto inner = env;
        inner[e->name] = k.first;
        UtilDist rest = util_eval(e->kids[1], inner);
        for (auto& [k2, p2] : rest.outcomes) d.outcomes[{k2.first, k.second + k2.second}] += p * p2;
        d.bottom += p * rest.bottom;
      }
      return d;
    }
    default:
      input_error("not a util expression: " + dappl::to_string(e), e->span);
  }
}

double util_eu(const dappl::ExprPtr& core) {
  UtilDist d = util_eval(core);
  double ok = 0, eu = 0;
  for (auto& [k, p] : d.outcomes) {
    ok += p;
    if (k.first) eu += k.second * p;
  }
  if (ok <= 0) return neg_inf;
  return eu / ok;
}

MeuAnswer dappl_meu_enum(const dappl::ExprPtr& core) {
  std::vector<dappl::Site> ss = dappl::sites(core);
  double space = 1;
  for (auto& s : ss) space *= static_cast<double>(s.names.size());
  if (space > 16384) throw Error(ErrorKind::usage, "dappl_meu_enum: policy space too large");
  MeuAnswer best;
  best.eu = neg_inf;
  std::vector<size_t> idx(ss.size(), 0);
  bool first = true;
  while (true) {
    dappl::Policy pol;
    for (size_t i = 0; i < ss.size(); ++i) pol[ss[i].label] = ss[i].names[idx[i]];
    double eu = util_eu(dappl::reduce(core, pol));
    if (first || eu > best.eu) {
      best.policy = pol;
      best.eu = eu;
      first = false;
    }
    size_t i = 0;
    while (i < ss.size() && ++idx[i] == ss[i].names.size()) idx[i++] = 0;
    if (i == ss.size()) break;
  }
  return best;
}

}  // namespace meu::oracle
