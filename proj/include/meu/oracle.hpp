#pragma once

// Brute-force reference implementations. Nothing here touches the BDD engine:
// formulas are evaluated by truth table and distributions are explicit maps.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "meu/dappl.hpp"
#include "meu/pineappl.hpp"
#include "meu/semiring.hpp"

namespace meu::oracle {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum Op { var, tt, ff, not_, and_, or_, xor_, iff } op = tt;
  int v = 0;
  std::vector<FormulaPtr> kids;
};

FormulaPtr f_var(int v);
FormulaPtr f_const(bool b);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_xor(FormulaPtr a, FormulaPtr b);
FormulaPtr f_iff(FormulaPtr a, FormulaPtr b);
bool eval(const FormulaPtr& f, const std::vector<bool>& assignment);

template <class S>
struct LitWeights {
  typename S::value pos, neg;
};

// Sum over every assignment to `universe` satisfying f of the product of its
// literal weights. Variables are indices into `weights` and `assignment`.
template <class S>
typename S::value brute_amc(const FormulaPtr& f, const std::vector<LitWeights<S>>& weights,
                            const std::vector<int>& universe) {
  if (universe.size() > 20) throw Error(ErrorKind::usage, "brute_amc: universe too large");
  std::vector<bool> a(weights.size(), false);
  typename S::value total = S::zero();
  for (uint64_t m = 0; m < (uint64_t{1} << universe.size()); ++m) {
    for (size_t i = 0; i < universe.size(); ++i) a[universe[i]] = (m >> i) & 1;
    if (!eval(f, a)) continue;
    typename S::value w = S::one();
    for (int v : universe) w = S::mul(w, a[v] ? weights[v].pos : weights[v].neg);
    total = S::add(total, w);
  }
  return total;
}

struct MmapAnswer {
  std::vector<bool> assignment;  // parallel to M
  double value = 0;
};

// argmax over inst(M) of Pr[m | evidence] under the real weights; ties go to
// the lexicographically smallest assignment (false < true, M order).
MmapAnswer mmap_enum(const FormulaPtr& phi, const std::vector<int>& m,
                     const std::vector<LitWeights<RealSemiring>>& weights,
                     const FormulaPtr& evidence, const std::vector<int>& universe);

// Outcome distribution of a util program: (returned Boolean, accumulated
// reward) pairs with their masses, plus the mass of failed observations.
struct UtilDist {
  std::map<std::pair<bool, double>, double> outcomes;
  double bottom = 0;
};

UtilDist util_eval(const dappl::ExprPtr& core, const std::map<std::string, bool>& env = {});
// Conditional expected reward over traces returning tt; -inf if every trace fails.
double util_eu(const dappl::ExprPtr& core);

struct MeuAnswer {
  double eu = 0;
  dappl::Policy policy;
};
MeuAnswer dappl_meu_enum(const dappl::ExprPtr& core);

// Big-step interpreter over explicit distributions (loops and rebinding
// handled natively on the source program).
pineappl::Outcome pineappl_interp(const pineappl::Program& program);

}  // namespace meu::oracle
