#include "meu/bbir.hpp"

namespace meu {

MeuObjective::MeuObjective(BddManager& mgr, const Bbir<S>& bbir, std::vector<std::vector<VarId>> groups)
    : mgr_(mgr), bbir_(bbir), be_(mgr, bbir.weights, bbir.branch_vars), groups_(std::move(groups)) {
  if (bbir.formulas.size() != 2) throw Error(ErrorKind::usage, "MEU objective needs {phi & gamma, gamma}");
  group_of_.assign(mgr.var_count(), -1);
  for (size_t g = 0; g < groups_.size(); ++g)
    for (VarId v : groups_[g]) group_of_[v] = static_cast<int>(g);
}

ExpectationValue MeuObjective::bound(const std::vector<Bdd>& f, const PartialPolicy& p) {
  V t = be_.upper(f[0], p);
  auto g = be_.box(f[1], p);
  double y = g.hi.prob;
  if (y == 0) return S::bottom();
  double x = g.lo.prob;
  if (x > 0) return S::join(scalar_div(t, x), scalar_div(t, y));
  // Some completion may have arbitrarily small evidence mass: only a
  // nonpositive utility numerator still bounds the ratio.
  V out;
  out.prob = t.prob > 0 ? pos_inf : 0.0;
  out.util = t.util > 0 ? pos_inf : t.util / y;
  return out;
}

ExpectationValue MeuObjective::value(const std::vector<Bdd>& f, const PartialPolicy& p) {
  return scalar_div(be_.upper(f[0], p), be_.upper(f[1], p).prob);
}

bool MeuObjective::feasible(const PartialPolicy& p, Literal l) const {
  if (l.var >= group_of_.size() || group_of_[l.var] < 0) return true;
  const auto& grp = groups_[group_of_[l.var]];
  size_t trues = 0, decided = 0;
  for (const Literal& a : p) {
    if (a.var < group_of_.size() && group_of_[a.var] == group_of_[l.var]) {
      ++decided;
      if (a.positive) ++trues;
    }
  }
  if (l.positive) return trues == 0;
  size_t open_after = grp.size() - decided - 1;
  return trues > 0 || open_after > 0;
}

MmapObjective::MmapObjective(BddManager& mgr, const Bbir<S>& bbir)
    : mgr_(mgr), bbir_(bbir), be_(mgr, bbir.weights, bbir.branch_vars) {
  if (bbir.formulas.size() != 1) throw Error(ErrorKind::usage, "MMAP objective needs {phi & gamma}");
  z_ = mgr.amc(bbir.formulas[0], bbir.weights);
  if (z_ <= 0) solve_error("evidence has probability zero");
}

}  // namespace meu
