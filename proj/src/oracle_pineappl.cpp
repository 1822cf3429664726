#include <algorithm>

#include "meu/oracle.hpp"

namespace meu::oracle {

namespace {

using pineappl::EKind;
using pineappl::PExprPtr;
using pineappl::SKind;
using pineappl::Stmt;

// Booleans are 0/1; a discrete variable holds 2 + the index of its outcome.
using Env = std::map<std::string, int>;
using Dist = std::map<Env, double>;

class Interp {
 public:
  pineappl::Outcome run(const pineappl::Program& p) {
    Dist d{{Env{}, 1.0}};
    d = body(p.body, d);
    pineappl::Outcome out;
    for (const auto& q : p.queries) {
      if (q.kind == pineappl::Query::mmap) {
        out.terminal = mmap(q.args, q.evidence, d);
        continue;
      }
      double num = 0, den = 0;
      for (auto& [s, m] : d) {
        if (q.evidence && !eval(q.evidence, s)) continue;
        den += m;
        if (eval(q.expr, s)) num += m;
      }
      if (den <= 0) solve_error("evidence of " + q.text + " has probability zero");
      out.queries.push_back({q.text, num / den});
    }
    return out;
  }

  std::vector<pineappl::MmapResult> staged;

 private:
  bool eval(const PExprPtr& e, const Env& s) const {
    switch (e->kind) {
      case EKind::tt: return true;
      case EKind::ff: return false;
      case EKind::not_: return !eval(e->kids[0], s);
      case EKind::and_: return eval(e->kids[0], s) && eval(e->kids[1], s);
      case EKind::or_: return eval(e->kids[0], s) || eval(e->kids[1], s);
      case EKind::var: {
        int v = get(e->name, s, e->span);
        if (v > 1) input_error("'" + e->name + "' is discrete; test it with 'is'", e->span);
        return v == 1;
      }
      case EKind::is: {
        int v = get(e->name, s, e->span);
        auto it = alts_.find(e->name);
        if (v < 2 || it == alts_.end()) input_error("'" + e->name + "' is not a discrete variable", e->span);
        auto pos = std::find(it->second.begin(), it->second.end(), e->alt);
        if (pos == it->second.end()) input_error("'" + e->name + "' has no outcome '" + e->alt + "'", e->span);
        return v - 2 == pos - it->second.begin();
      }
    }
    return false;
  }

  static int get(const std::string& x, const Env& s, Span span) {
    auto it = s.find(x);
    if (it == s.end()) input_error("undefined variable '" + x + "'", span);
    return it->second;
  }

  static void put(Dist& d, Env s, double m) {
    if (m > 0) d[std::move(s)] += m;
  }

  Dist body(const std::vector<Stmt>& stmts, Dist d) {
    for (const Stmt& s : stmts) d = stmt(s, d);
    return d;
  }

  pineappl::MmapResult mmap(const std::vector<std::string>& args, const PExprPtr& ev, const Dist& d) {
    std::vector<double> mass(size_t{1} << args.size(), 0.0);
    double z = 0;
    for (auto& [s, m] : d) {
      if (ev && !eval(ev, s)) continue;
      z += m;
      size_t idx = 0;
      for (auto& a : args) {
        int v = get(a, s, {});
        if (v > 1) input_error("mmap over discrete variable '" + a + "' is not supported");
        idx = (idx << 1) | static_cast<size_t>(v);
      }
      mass[idx] += m;
    }
    if (z <= 0) solve_error("evidence has probability zero");
    size_t best = 0;
    double best_v = neg_inf;
    for (size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] / z > best_v + 1e-9) {
        best_v = mass[i] / z;
        best = i;
      }
    }
    pineappl::MmapResult r;
    r.posterior = best_v;
    for (size_t j = 0; j < args.size(); ++j) r.assignment.push_back({args[j], ((best >> (args.size() - 1 - j)) & 1) != 0});
    return r;
  }

  Dist stmt(const Stmt& st, const Dist& d) {
    Dist out;
    switch (st.kind) {
      case SKind::flip:
        for (auto& [s, m] : d) {
          Env a = s, b = s;
          a[st.targets[0]] = 1;
          b[st.targets[0]] = 0;
          put(out, a, m * st.theta);
          put(out, b, m * (1 - st.theta));
        }
        return out;
      case SKind::assign:
        for (auto& [s, m] : d) {
          Env a = s;
          a[st.targets[0]] = eval(st.expr, s) ? 1 : 0;
          put(out, a, m);
        }
        return out;
      case SKind::disc:
        alts_[st.targets[0]] = st.alts;
        for (auto& [s, m] : d) {
          for (size_t i = 0; i < st.alts.size(); ++i) {
            Env a = s;
            a[st.targets[0]] = 2 + static_cast<int>(i);
            put(out, a, m * st.probs[i]);
          }
        }
        return out;
      case SKind::loop: {
        Dist cur = d;
        for (int i = 0; i < st.count; ++i) cur = body(st.then_body, cur);
        return cur;
      }
      case SKind::if_: {
        std::string h = "#if" + std::to_string(hidden_++);
        Dist g;
        for (auto& [s, m] : d) {
          Env a = s;
          a[h] = eval(st.expr, s) ? 1 : 0;
          put(g, a, m);
        }
        Dist t = body(st.then_body, g);
        Dist e = body(st.else_body, g);
        for (auto& [s, m] : t) {
          if (s.at(h) != 1) continue;
          Env a = s;
          a.erase(h);
          put(out, a, m);
        }
        for (auto& [s, m] : e) {
          if (s.at(h) != 0) continue;
          Env a = s;
          a.erase(h);
          put(out, a, m);
        }
        return out;
      }
      case SKind::mmap: {
        pineappl::MmapResult r = mmap(st.args, st.evidence, d);
        pineappl::MmapResult bound;
        bound.posterior = r.posterior;
        for (size_t i = 0; i < st.targets.size(); ++i)
          bound.assignment.push_back({st.targets[i], r.assignment[i].second});
        staged.push_back(bound);
        for (auto& [s, m] : d) {
          Env a = s;
          for (auto& [x, v] : bound.assignment) a[x] = v ? 1 : 0;
          put(out, a, m);
        }
        return out;
      }
    }
    return out;
  }

  std::map<std::string, std::vector<std::string>> alts_;
  int hidden_ = 0;
};

}  // namespace

pineappl::Outcome pineappl_interp(const pineappl::Program& program) {
  Interp in;
  pineappl::Outcome out = in.run(program);
  out.staged = in.staged;
  return out;
}

}  // namespace meu::oracle
