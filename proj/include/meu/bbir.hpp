#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "meu/bdd.hpp"

namespace meu {

// Assignments to branch variables, in the order they were made.
using PartialPolicy = std::vector<Literal>;

template <class S>
struct Bbir {
  std::vector<Bdd> formulas;
  std::vector<VarId> branch_vars;
  WeightMap<S> weights;
};

// Lower and upper bounds carried through one bound pass.
template <class S>
struct BoundBox {
  typename S::value lo, hi;
};

// w (x) [lo, hi]. For the reals (nonnegative weights) this is monotone, so
// the endpoints map to endpoints.
template <class S>
struct BoxOps {
  using V = typename S::value;
  static BoundBox<S> scale(V w, const BoundBox<S>& b) { return {S::mul(w, b.lo), S::mul(w, b.hi)}; }
};

// (q,v) (x) (p,u) = (qp, qu + vp) is not monotone in p when v < 0, so a
// negative utility weight pairs the upper utility with the lower probability.
// With v >= 0 this is exactly the pointwise product of the endpoints.
template <>
struct BoxOps<ExpectationSemiring> {
  using S = ExpectationSemiring;
  using V = ExpectationValue;
  static BoundBox<S> scale(V w, const BoundBox<S>& b) {
    double plo = b.lo.prob, phi = b.hi.prob;
    double ulo = guarded_mul(w.prob, b.lo.util), uhi = guarded_mul(w.prob, b.hi.util);
    if (w.util >= 0) {
      ulo += guarded_mul(w.util, plo);
      uhi += guarded_mul(w.util, phi);
    } else {
      ulo += guarded_mul(w.util, phi);
      uhi += guarded_mul(w.util, plo);
    }
    return {{w.prob * plo, ulo}, {w.prob * phi, uhi}};
  }
};

// Evaluates pm (x) h(f|P): the single-pass bound over every completion of P.
// Unassigned branch variables combine their two cofactors with join (upper
// side) and meet (lower side); every other variable sums. Both sides are
// computed together since a product can need the opposite endpoint.
template <class S>
class BoundEvaluator {
 public:
  using V = typename S::value;
  using Box = BoundBox<S>;

  BoundEvaluator(BddManager& mgr, const WeightMap<S>& w, const std::vector<VarId>& branch_vars)
      : mgr_(mgr), w_(w), universe_(w.domain()) {
    is_branch_.assign(mgr.var_count(), false);
    for (VarId v : branch_vars) {
      if (v >= is_branch_.size()) input_error("branch variable " + std::to_string(v) + " is unknown");
      if (!w.has(v)) input_error("branch variable '" + mgr.label(v) + "' has no weight");
      is_branch_[v] = true;
    }
    assigned_.assign(mgr.var_count(), -1);
    std::vector<V> factors(universe_.size());
    for (size_t i = 0; i < universe_.size(); ++i) {
      factors[i] = S::add(w.pos(universe_[i]), w.neg(universe_[i]));
      if (is_branch_[universe_[i]]) special_.push_back(i);
    }
    plain_ = RangeProduct<S>(factors);
  }

  Box box(Bdd f, const PartialPolicy& p) {
    for (const Literal& l : p) {
      if (l.var >= is_branch_.size() || !is_branch_[l.var])
        input_error("assignment to '" + mgr_.label(l.var) + "', which is not a branch variable");
      assigned_[l.var] = l.positive ? 1 : 0;
    }
    memo_.clear();
    V pm = S::one();
    for (const Literal& l : p) pm = S::mul(pm, w_.lit(l));
    Box h = gap(-1, level(f), rec(f));
    for (const Literal& l : p) assigned_[l.var] = -1;
    return BoxOps<S>::scale(pm, h);
  }

  V upper(Bdd f, const PartialPolicy& p) { return box(f, p).hi; }
  V lower(Bdd f, const PartialPolicy& p) { return box(f, p).lo; }

  uint64_t node_visits() const { return visits_; }

 private:
  static Box point(V v) { return {v, v}; }

  int64_t level(Bdd c) const {
    return c.is_terminal() ? static_cast<int64_t>(mgr_.var_count()) + 1 : mgr_.var_of(c);
  }

  Box combine(VarId v, const Box& hi, const Box& lo) const {
    if (!is_branch_[v]) return {S::add(hi.lo, lo.lo), S::add(hi.hi, lo.hi)};
    return {S::meet(hi.lo, lo.lo), S::join(hi.hi, lo.hi)};
  }

  Box weigh(VarId v, const Box& h, const Box& l) const {
    return combine(v, BoxOps<S>::scale(w_.pos(v), h), BoxOps<S>::scale(w_.neg(v), l));
  }

  // Folds in the universe variables strictly between the two levels, deepest
  // first. Runs of non-branch variables collapse to one range product.
  Box gap(int64_t above, int64_t below, Box val) const {
    size_t i = std::upper_bound(universe_.begin(), universe_.end(), above,
                                [](int64_t x, VarId u) { return x < static_cast<int64_t>(u); }) -
               universe_.begin();
    size_t j = std::lower_bound(universe_.begin() + i, universe_.end(), below,
                                [](VarId u, int64_t x) { return static_cast<int64_t>(u) < x; }) -
               universe_.begin();
    auto s = std::lower_bound(special_.begin(), special_.end(), j);
    while (s != special_.begin() && *(s - 1) >= i) {
      size_t k = *--s;
      val = run(k + 1, j, val);
      VarId g = universe_[k];
      if (assigned_[g] < 0) val = weigh(g, val, val);
      j = k;
    }
    return run(i, j, val);
  }

  Box run(size_t i, size_t j, const Box& val) const {
    if (i >= j) return val;
    return BoxOps<S>::scale(plain_.apply(i, j, S::one()), val);
  }

  Box rec(Bdd a) {
    if (a.is_false()) return point(S::zero());
    if (a.is_true()) return point(S::one());
    if (auto it = memo_.find(a.id()); it != memo_.end()) return it->second;
    ++visits_;
    VarId v = mgr_.var_of(a);
    if (!w_.has(v)) input_error("variable '" + mgr_.label(v) + "' has no weight");
    Bdd hi = mgr_.high(a), lo = mgr_.low(a);
    Box r;
    if (assigned_[v] >= 0) {
      Bdd c = assigned_[v] ? hi : lo;
      r = gap(v, level(c), rec(c));
    } else {
      r = weigh(v, gap(v, level(hi), rec(hi)), gap(v, level(lo), rec(lo)));
    }
    memo_.emplace(a.id(), r);
    return r;
  }

  BddManager& mgr_;
  const WeightMap<S>& w_;
  std::vector<VarId> universe_;
  std::vector<bool> is_branch_;
  std::vector<int8_t> assigned_;
  std::vector<size_t> special_;  // universe positions of branch variables
  RangeProduct<S> plain_;
  std::unordered_map<uint32_t, Box> memo_;
  uint64_t visits_ = 0;
};

template <class S>
typename S::value ub(BddManager& mgr, const Bbir<S>& b, Bdd f, const PartialPolicy& p) {
  BoundEvaluator<S> be(mgr, b.weights, b.branch_vars);
  return be.upper(f, p);
}

template <class S>
typename S::value lb(BddManager& mgr, const Bbir<S>& b, Bdd f, const PartialPolicy& p) {
  BoundEvaluator<S> be(mgr, b.weights, b.branch_vars);
  return be.lower(f, p);
}

enum class BranchHeuristic { registration, largest_gap };

struct BbOptions {
  bool prune = true;
  BranchHeuristic heuristic = BranchHeuristic::registration;
  double timeout_ms = 0;  // 0: no limit
};

struct BbStats {
  uint64_t nodes_created = 0;  // search nodes, interior and leaves
  uint64_t bound_calls = 0;
  uint64_t prunes = 0;
  uint64_t base_cases = 0;
  uint64_t infeasible = 0;  // literals rejected by the objective's side constraints
  double elapsed_ms = 0;
  bool timed_out = false;
};

template <class V>
struct SolveResult {
  V value{};
  PartialPolicy witness;
  BbStats stats;
  bool feasible = true;  // false when no policy reached a finite value
};

// Expected utility: formulas are {phi & gamma, gamma}; branch variables come in
// one-hot groups (one group per choice site).
class MeuObjective {
 public:
  using S = ExpectationSemiring;
  using V = ExpectationValue;

  MeuObjective(BddManager& mgr, const Bbir<S>& bbir, std::vector<std::vector<VarId>> groups = {});

  const std::vector<Bdd>& formulas() const { return bbir_.formulas; }
  const std::vector<VarId>& branch_vars() const { return bbir_.branch_vars; }
  BddManager& manager() { return mgr_; }

  V bound(const std::vector<Bdd>& f, const PartialPolicy& p);
  V value(const std::vector<Bdd>& f, const PartialPolicy& p);
  bool feasible(const PartialPolicy& p, Literal l) const;
  std::vector<bool> literal_order() const { return {true, false}; }
  bool improves(V cand, V incumbent) const { return !S::total_le(cand, incumbent); }
  bool prunable(V bound, V incumbent) const { return S::partial_le(bound, incumbent); }
  static V bottom() { return S::bottom(); }
  static double scalar(V v) { return v.util; }

 private:
  BddManager& mgr_;
  const Bbir<S>& bbir_;
  BoundEvaluator<S> be_;
  std::vector<std::vector<VarId>> groups_;
  std::vector<int> group_of_;
};

// Marginal MAP: formulas are {phi & gamma}, already conditioned on any prior.
// The objective is the posterior AMC(phi & gamma | m) w(m) / Z with the
// constant Z = AMC(phi & gamma). Ties resolve toward the lexicographically
// smallest assignment (false < true, branch-variable order).
class MmapObjective {
 public:
  using S = RealSemiring;
  using V = double;
  static constexpr double tie_tolerance = 1e-9;

  MmapObjective(BddManager& mgr, const Bbir<S>& bbir);

  const std::vector<Bdd>& formulas() const { return bbir_.formulas; }
  const std::vector<VarId>& branch_vars() const { return bbir_.branch_vars; }
  BddManager& manager() { return mgr_; }
  double normalizer() const { return z_; }

  V bound(const std::vector<Bdd>& f, const PartialPolicy& p) { return be_.upper(f[0], p) / z_; }
  V value(const std::vector<Bdd>& f, const PartialPolicy& p) { return be_.upper(f[0], p) / z_; }
  bool feasible(const PartialPolicy&, Literal) const { return true; }
  std::vector<bool> literal_order() const { return {false, true}; }
  bool improves(V cand, V incumbent) const { return cand > incumbent + tie_tolerance; }
  bool prunable(V bound, V incumbent) const { return bound <= incumbent + tie_tolerance; }
  static V bottom() { return S::bottom(); }
  static double scalar(V v) { return v; }

 private:
  BddManager& mgr_;
  const Bbir<S>& bbir_;
  BoundEvaluator<S> be_;
  double z_ = 0;
};

template <class O>
typename O::V evaluate_objective(O& obj, const PartialPolicy& total) {
  std::vector<Bdd> f = obj.formulas();
  for (auto& g : f) g = obj.manager().condition(g, total);
  return obj.value(f, total);
}

template <class O>
SolveResult<typename O::V> bb(O& obj, const BbOptions& opt = {}) {
  using V = typename O::V;
  using clock = std::chrono::steady_clock;
  auto start = clock::now();
  BddManager& mgr = obj.manager();
  SolveResult<V> res;
  res.value = O::bottom();
  res.feasible = false;
  auto elapsed = [&] { return std::chrono::duration<double, std::milli>(clock::now() - start).count(); };

  std::function<void(const std::vector<Bdd>&, std::vector<VarId>, PartialPolicy&)> rec =
      [&](const std::vector<Bdd>& f, std::vector<VarId> rest, PartialPolicy& p) {
        ++res.stats.nodes_created;
        if (opt.timeout_ms > 0 && elapsed() > opt.timeout_ms) {
          res.stats.timed_out = true;
          return;
        }
        if (rest.empty()) {
          ++res.stats.base_cases;
          V v = obj.value(f, p);
          if (res.witness.empty()) res.witness = p;
          if (obj.improves(v, res.value)) {
            res.value = v;
            res.witness = p;
            res.feasible = true;
          }
          return;
        }
        size_t pick = 0;
        if (opt.heuristic == BranchHeuristic::largest_gap && rest.size() > 1) {
          double best = -1;
          for (size_t i = 0; i < rest.size(); ++i) {
            double s[2];
            for (int j = 0; j < 2; ++j) {
              Literal l{rest[i], j == 0};
              std::vector<Bdd> g = f;
              for (auto& x : g) x = mgr.condition(x, l);
              p.push_back(l);
              ++res.stats.bound_calls;
              s[j] = O::scalar(obj.bound(g, p));
              p.pop_back();
            }
            double gap = std::isfinite(s[0] - s[1]) ? std::fabs(s[0] - s[1])
                                                     : (s[0] == s[1] ? 0.0 : pos_inf);
            if (gap > best) best = gap, pick = i;
          }
        }
        VarId r = rest[pick];
        rest.erase(rest.begin() + static_cast<long>(pick));
        for (bool pol : obj.literal_order()) {
          Literal l{r, pol};
          if (!obj.feasible(p, l)) {
            ++res.stats.infeasible;
            continue;
          }
          std::vector<Bdd> g = f;
          for (auto& x : g) x = mgr.condition(x, l);
          p.push_back(l);
          ++res.stats.bound_calls;
          V m = obj.bound(g, p);
          if (opt.prune && obj.prunable(m, res.value)) {
            ++res.stats.prunes;
          } else {
            rec(g, rest, p);
          }
          p.pop_back();
          if (res.stats.timed_out) return;
        }
      };

  PartialPolicy p;
  rec(obj.formulas(), obj.branch_vars(), p);
  if (res.witness.size() != obj.branch_vars().size()) {
    // Nothing reached a base case: report any side-constraint-respecting policy.
    res.witness.clear();
    for (VarId v : obj.branch_vars()) {
      for (bool pol : obj.literal_order()) {
        if (obj.feasible(res.witness, {v, pol})) {
          res.witness.push_back({v, pol});
          break;
        }
      }
    }
  }
  res.stats.elapsed_ms = elapsed();
  return res;
}

}  // namespace meu
