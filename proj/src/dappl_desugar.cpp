#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "meu/dappl.hpp"

namespace meu::dappl {

std::string to_string(const Type& t) {
  auto list = [&] {
    std::string s;
    for (size_t i = 0; i < t.names.size(); ++i) s += (i ? ", " : "") + t.names[i];
    return s;
  };
  switch (t.tag) {
    case Type::boolean: return "Bool";
    case Type::dist: return "Dist";
    case Type::choice: return "Choice[" + list() + "]";
    case Type::categorical: return "Categorical[" + list() + "]";
  }
  return "?";
}

namespace {

Type mk_type(Type::Tag tag, std::vector<std::string> names = {}) {
  std::sort(names.begin(), names.end());
  return {tag, std::move(names)};
}

using TypeEnv = std::map<std::string, Type>;

Type check(const ExprPtr& e, TypeEnv& env);

Type as_dist(const ExprPtr& e, TypeEnv& env, const char* where) {
  Type t = check(e, env);
  if (t.tag == Type::boolean) return mk_type(Type::dist);
  if (t.tag != Type::dist) input_error(std::string(where) + " must be a distribution, not " + to_string(t), e->span);
  return t;
}

void expect_bool(const ExprPtr& e, TypeEnv& env, const char* where) {
  Type t = check(e, env);
  if (t.tag != Type::boolean) input_error(std::string(where) + " must be Bool, not " + to_string(t), e->span);
}

Type check(const ExprPtr& e, TypeEnv& env) {
  switch (e->kind) {
    case Kind::var: {
      auto it = env.find(e->name);
      if (it == env.end() || e->name == "_") input_error("unbound variable '" + e->name + "'", e->span);
      return it->second;
    }
    case Kind::tt:
    case Kind::ff: return mk_type(Type::boolean);
    case Kind::not_:
    case Kind::and_:
    case Kind::or_:
      for (auto& k : e->kids) expect_bool(k, env, "operand");
      return mk_type(Type::boolean);
    case Kind::ret: expect_bool(e->kids[0], env, "returned value"); return mk_type(Type::dist);
    case Kind::flip: return mk_type(Type::dist);
    case Kind::reward: as_dist(e->kids[0], env, "reward body"); return mk_type(Type::dist);
    case Kind::ite: {
      Type g = check(e->kids[0], env);
      bool overloaded = g.tag == Type::choice && g.names.size() == 1;
      if (g.tag != Type::boolean && !overloaded)
        input_error("if guard must be Bool, not " + to_string(g), e->kids[0]->span);
      Type t = as_dist(e->kids[1], env, "then branch");
      Type f = as_dist(e->kids[2], env, "else branch");
      if (!(t == f)) input_error("branch types differ: " + to_string(t) + " vs " + to_string(f), e->span);
      return t;
    }
    case Kind::observe:
      expect_bool(e->kids[0], env, "observed expression");
      return as_dist(e->kids[1], env, "observe body");
    case Kind::bind: {
      Type t1 = check(e->kids[0], env);
      if (t1.tag == Type::dist) t1 = mk_type(Type::boolean);
      auto saved = env.find(e->name) != env.end() ? std::optional<Type>(env[e->name]) : std::nullopt;
      env[e->name] = t1;
      Type t2 = check(e->kids[1], env);
      if (saved) env[e->name] = *saved; else env.erase(e->name);
      return t2;
    }
    case Kind::intro:
      if (e->names.empty()) input_error("a choice needs at least one alternative", e->span);
      return mk_type(Type::choice, e->names);
    case Kind::choose: {
      Type s = check(e->kids.empty() ? mk_var(e->name, e->span) : e->kids[0], env);
      if (s.tag != Type::choice && s.tag != Type::categorical)
        input_error("choose scrutinee must be a choice or categorical, not " + to_string(s), e->span);
      std::vector<std::string> arms;
      for (auto& a : e->arms) arms.push_back(a.name);
      std::sort(arms.begin(), arms.end());
      if (arms != s.names)
        input_error("choose arms " + to_string(mk_type(Type::choice, arms)).substr(6) + " do not match " +
                        to_string(s),
                    e->span);
      std::optional<Type> result;
      for (auto& a : e->arms) {
        Type t = as_dist(a.body, env, "choose arm");
        if (result && !(*result == t)) input_error("choose arms have different types", a.body->span);
        result = t;
      }
      return *result;
    }
    case Kind::disc: {
      double sum = 0;
      for (double p : e->probs) sum += p;
      if (std::abs(sum - 1.0) > 1e-9) input_error("disc probabilities sum to " + std::to_string(sum), e->span);
      return mk_type(Type::categorical, e->names);
    }
    case Kind::loop:
      if (e->count < 1) input_error("loop bound must be at least 1", e->span);
      return as_dist(e->kids[0], env, "loop body");
  }
  return mk_type(Type::dist);
}

// Guard/scrutinee use of a choice-bound name inside its scope.
void uses(const ExprPtr& e, const std::string& x, bool& guard, bool& scrutinee) {
  if (!e) return;
  if (e->kind == Kind::ite && e->kids[0]->kind == Kind::var && e->kids[0]->name == x) guard = true;
  if (e->kind == Kind::choose && !e->kids.empty() && e->kids[0]->kind == Kind::var && e->kids[0]->name == x)
    scrutinee = true;
  if (e->kind == Kind::bind) {
    uses(e->kids[0], x, guard, scrutinee);
    if (e->name != x) uses(e->kids[1], x, guard, scrutinee);
    return;
  }
  for (auto& k : e->kids) uses(k, x, guard, scrutinee);
  for (auto& a : e->arms) uses(a.body, x, guard, scrutinee);
}

ExprPtr core_guarded(Kind k, const std::string& g, std::vector<ExprPtr> kids, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->name = g;
  e->span = s;
  e->kids = std::move(kids);
  return e;
}

ExprPtr core_choose(const std::string& x, std::vector<Arm> arms, Span s) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::choose;
  e->name = x;
  e->span = s;
  e->arms = std::move(arms);
  return e;
}

class Desugarer {
 public:
  ExprPtr run(const ExprPtr& e) { return dist(e); }

 private:
  struct Info {
    Type::Tag tag = Type::boolean;
    std::vector<std::string> alts;  // categorical: outcomes in declared order
    std::string alpha;              // widened single choice: the "do" alternative
  };

  std::string fresh(const char* p) { return std::string("#") + p + std::to_string(fresh_++); }
  std::string new_site() { return "c" + std::to_string(sites_++); }

  ExprPtr intro(const std::vector<std::string>& names, Span s) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::intro;
    e->names = names;
    e->site = new_site();
    e->span = s;
    return e;
  }

  // Binds the guard to a variable when it is not one already.
  template <class F>
  ExprPtr with_guard(const ExprPtr& g, F build) {
    if (g->kind == Kind::var) return build(g->name);
    std::string x = fresh("g");
    return mk_bind(x, mk_ret(g, g->span), build(x), g->span);
  }

  template <class F>
  ExprPtr scoped(const std::string& x, Info info, F body) {
    auto it = env_.find(x);
    std::optional<Info> saved = it != env_.end() ? std::optional<Info>(it->second) : std::nullopt;
    env_[x] = std::move(info);
    ExprPtr out = body();
    if (saved) env_[x] = *saved; else env_.erase(x);
    return out;
  }

  Info info_of(const std::string& x) const {
    auto it = env_.find(x);
    return it == env_.end() ? Info{} : it->second;
  }

  ExprPtr dist(const ExprPtr& e) {
    if (is_pure(e->kind)) return mk_ret(e, e->span);
    switch (e->kind) {
      case Kind::ret:
      case Kind::flip: return e;
      case Kind::reward: return mk_reward(e->num, dist(e->kids[0]), e->span);
      case Kind::ite: {
        const ExprPtr& g = e->kids[0];
        if (g->kind == Kind::intro) {
          // A lone `[a]` as a guard is the decision "do a or not".
          std::string c = fresh("c");
          auto site = intro({g->names[0], "not_" + g->names[0]}, g->span);
          return mk_bind(c, site,
                         core_choose(c, {{g->names[0], dist(e->kids[1])}, {"not_" + g->names[0], dist(e->kids[2])}},
                                     e->span),
                         e->span);
        }
        if (g->kind == Kind::var) {
          Info in = info_of(g->name);
          if (in.tag == Type::choice)
            return core_choose(g->name, {{in.alpha, dist(e->kids[1])}, {"not_" + in.alpha, dist(e->kids[2])}},
                               e->span);
        }
        return with_guard(g, [&](const std::string& x) {
          return core_guarded(Kind::ite, x, {dist(e->kids[1]), dist(e->kids[2])}, e->span);
        });
      }
      case Kind::observe:
        return with_guard(e->kids[0], [&](const std::string& x) {
          return core_guarded(Kind::observe, x, {dist(e->kids[1])}, e->span);
        });
      case Kind::bind: return bind(e->name, e->kids[0], e->kids[1], e->span);
      case Kind::choose: {
        const ExprPtr& s = e->kids[0];
        if (s->kind != Kind::var) {
          std::string x = fresh("s");
          auto body = std::make_shared<Expr>(*e);
          body->kids = {mk_var(x, s->span)};
          return bind(x, s, body, e->span);
        }
        Info in = info_of(s->name);
        if (in.tag == Type::categorical) {
          // Nested tests on the one-hot indicators, in declared order.
          auto arm = [&](const std::string& a) -> ExprPtr {
            for (auto& m : e->arms)
              if (m.name == a) return m.body;
            input_error("missing arm '" + a + "'", e->span);
          };
          ExprPtr out = dist(arm(in.alts.back()));
          for (size_t i = in.alts.size() - 1; i-- > 0;)
            out = core_guarded(Kind::ite, indicator(s->name, in.alts[i]), {dist(arm(in.alts[i])), out}, e->span);
          return out;
        }
        std::vector<Arm> arms;
        for (auto& a : e->arms) arms.push_back({a.name, dist(a.body)});
        return core_choose(s->name, std::move(arms), e->span);
      }
      case Kind::loop: {
        ExprPtr out = dist(e->kids[0]);
        std::vector<ExprPtr> copies;
        for (int i = 1; i < e->count; ++i) copies.push_back(dist(e->kids[0]));
        // Copies are desugared in program order so their sites number left to right.
        if (copies.empty()) return out;
        ExprPtr tail = copies.back();
        copies.pop_back();
        copies.insert(copies.begin(), out);
        for (size_t i = copies.size(); i-- > 0;) tail = mk_bind("_", copies[i], tail, e->span);
        return tail;
      }
      case Kind::intro: input_error("a choice is not a distribution; bind it and choose on it", e->span);
      case Kind::disc: input_error("a categorical is not a distribution; bind it and choose on it", e->span);
      default: break;
    }
    input_error("unexpected expression", e->span);
  }

  static std::string indicator(const std::string& x, const std::string& a) { return x + "#" + a; }

  ExprPtr bind(const std::string& x, const ExprPtr& e1, const ExprPtr& e2, Span s) {
    if (e1->kind == Kind::disc) {
      Info in;
      in.tag = Type::categorical;
      in.alts = e1->names;
      std::vector<std::pair<std::string, ExprPtr>> steps;
      double rem = 1.0;
      const size_t n = e1->names.size();
      ExprPtr any_prev;
      for (size_t i = 0; i < n; ++i) {
        std::string v = indicator(x, e1->names[i]);
        double p = e1->probs[i];
        ExprPtr rhs;
        if (n == 1) {
          rhs = mk_ret(mk(Kind::tt, s), s);
        } else if (i == 0) {
          rhs = mk_flip(p, s);
        } else if (i + 1 == n) {
          rhs = mk_ret(mk_unary(Kind::not_, any_prev, s), s);
        } else {
          double q = rem > 1e-12 ? std::clamp(p / rem, 0.0, 1.0) : 0.0;
          std::string g = fresh("g");
          rhs = mk_bind(g, mk_ret(any_prev, s),
                        core_guarded(Kind::ite, g, {mk_ret(mk(Kind::ff, s), s), mk_flip(q, s)}, s), s);
        }
        steps.push_back({v, rhs});
        rem -= p;
        any_prev = any_prev ? mk_binary(Kind::or_, any_prev, mk_var(v, s), s) : mk_var(v, s);
      }
      ExprPtr body = scoped(x, in, [&] { return dist(e2); });
      for (size_t i = steps.size(); i-- > 0;) body = mk_bind(steps[i].first, steps[i].second, body, s);
      return body;
    }
    if (e1->kind == Kind::intro) {
      bool guard = false, scrutinee = false;
      uses(e2, x, guard, scrutinee);
      Info in;
      in.tag = Type::choice;
      std::vector<std::string> names = e1->names;
      if (guard) {
        if (scrutinee || names.size() != 1)
          input_error("'" + x + "' is used both as an if guard and as a choose scrutinee", e1->span);
        in.alpha = names[0];
        names.push_back("not_" + names[0]);
      }
      auto site = intro(names, e1->span);
      return mk_bind(x, site, scoped(x, in, [&] { return dist(e2); }), s);
    }
    ExprPtr c1 = dist(e1);
    return mk_bind(x, c1, scoped(x, Info{}, [&] { return dist(e2); }), s);
  }

  std::map<std::string, Info> env_;
  int fresh_ = 0;
  int sites_ = 0;
};

void collect_sites(const ExprPtr& e, std::vector<Site>& out) {
  if (e->kind == Kind::intro) out.push_back({e->site, e->names, e->span});
  for (auto& k : e->kids) collect_sites(k, out);
  for (auto& a : e->arms) collect_sites(a.body, out);
}

ExprPtr reduce_rec(const ExprPtr& e, const Policy& pol, std::map<std::string, std::string>& site_of) {
  switch (e->kind) {
    case Kind::bind: {
      auto saved = site_of.find(e->name) != site_of.end() ? std::optional<std::string>(site_of[e->name])
                                                           : std::nullopt;
      ExprPtr e1;
      if (e->kids[0]->kind == Kind::intro) {
        e1 = mk_ret(mk(Kind::tt, e->span), e->span);
        site_of[e->name] = e->kids[0]->site;
      } else {
        e1 = reduce_rec(e->kids[0], pol, site_of);
        site_of.erase(e->name);
      }
      ExprPtr e2 = reduce_rec(e->kids[1], pol, site_of);
      if (saved) site_of[e->name] = *saved; else site_of.erase(e->name);
      return mk_bind(e->name, e1, e2, e->span);
    }
    case Kind::choose: {
      auto it = site_of.find(e->name);
      if (it == site_of.end()) input_error("choose on '" + e->name + "', which is not a choice", e->span);
      auto p = pol.find(it->second);
      if (p == pol.end()) input_error("policy has no entry for site " + it->second, e->span);
      for (auto& a : e->arms)
        if (a.name == p->second) return reduce_rec(a.body, pol, site_of);
      input_error("policy picks '" + p->second + "', which site " + it->second + " does not offer", e->span);
    }
    case Kind::intro: input_error("unbound choice", e->span);
    default: {
      if (e->kids.empty()) return e;
      auto c = std::make_shared<Expr>(*e);
      for (auto& k : c->kids) k = reduce_rec(k, pol, site_of);
      return c;
    }
  }
}

}  // namespace

Type typecheck(const ExprPtr& e) {
  TypeEnv env;
  return as_dist(e, env, "program");
}

ExprPtr desugar(const ExprPtr& e) {
  typecheck(e);
  return Desugarer().run(e);
}

std::vector<Site> sites(const ExprPtr& core) {
  std::vector<Site> out;
  collect_sites(core, out);
  return out;
}

ExprPtr reduce(const ExprPtr& core, const Policy& policy) {
  std::map<std::string, std::string> site_of;
  return reduce_rec(core, policy, site_of);
}

}  // namespace meu::dappl
