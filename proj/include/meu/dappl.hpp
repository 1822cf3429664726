#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "meu/bbir.hpp"
#include "meu/error.hpp"

namespace meu::dappl {

enum class Kind {
  var, tt, ff, and_, or_, not_,  // pure
  ret, flip, reward, ite, bind, observe, intro, choose,
  disc, loop  // sugar, removed by desugar
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Arm {
  std::string name;
  ExprPtr body;
};

struct Expr {
  Kind kind = Kind::tt;
  Span span;
  std::string name;                // var; bind binder; ite/observe/choose guard once desugared
  double num = 0;                  // flip bias, reward amount
  int count = 0;                   // loop bound
  std::vector<std::string> names;  // intro alternatives, disc outcomes
  std::vector<double> probs;       // disc
  std::vector<ExprPtr> kids;
  std::vector<Arm> arms;           // choose
  std::string site;                // intro: choice-site label, set by desugar
};

ExprPtr mk(Kind k, Span s = {});
ExprPtr mk_var(const std::string& x, Span s = {});
ExprPtr mk_ret(ExprPtr p, Span s = {});
ExprPtr mk_flip(double theta, Span s = {});
ExprPtr mk_reward(double k, ExprPtr e, Span s = {});
ExprPtr mk_bind(const std::string& x, ExprPtr e1, ExprPtr e2, Span s = {});
ExprPtr mk_ite(ExprPtr g, ExprPtr t, ExprPtr e, Span s = {});
ExprPtr mk_observe(ExprPtr g, ExprPtr e, Span s = {});
ExprPtr mk_unary(Kind k, ExprPtr a, Span s = {});
ExprPtr mk_binary(Kind k, ExprPtr a, ExprPtr b, Span s = {});

bool is_pure(Kind k);
std::string to_string(const ExprPtr& e);

ExprPtr parse(const std::string& source);

struct Type {
  enum Tag { boolean, dist, choice, categorical } tag = boolean;
  std::vector<std::string> names;  // choice / categorical alternatives, sorted
  bool operator==(const Type& o) const { return tag == o.tag && names == o.names; }
};
std::string to_string(const Type& t);

// Types a closed program; a pure result counts as a distribution.
Type typecheck(const ExprPtr& e);

struct Site {
  std::string label;
  std::vector<std::string> names;
  Span span;
};

// Core form: no disc/loop, guards and scrutinees are variables, every choice
// introduction is bound by a bind and labelled with its site.
ExprPtr desugar(const ExprPtr& e);
std::vector<Site> sites(const ExprPtr& core);

using Policy = std::map<std::string, std::string>;  // site label -> alternative
ExprPtr reduce(const ExprPtr& core, const Policy& policy);

struct SiteVars {
  std::string label;
  std::vector<std::string> names;
  std::vector<VarId> vars;
};

struct CompiledDappl {
  Bdd value;       // Boolean result of the program along a trace
  Bdd gamma;       // every observation on the trace holds
  Bdd rewards;     // pins each reward variable to "executed on this trace"
  Bdd choices;     // one-hot constraint of every choice site
  WeightMap<ExpectationSemiring> weights;
  std::vector<VarId> reward_vars;
  std::vector<SiteVars> sites;
};

CompiledDappl compile(BddManager& mgr, const ExprPtr& core);

// {value & gamma & rewards & choices, gamma & rewards}, branch variables in
// registration order.
Bbir<ExpectationSemiring> finalize(BddManager& mgr, const CompiledDappl& c);
std::vector<std::vector<VarId>> site_groups(const CompiledDappl& c);

Policy policy_of(const CompiledDappl& c, const PartialPolicy& total);
PartialPolicy literals_of(const CompiledDappl& c, const Policy& policy);

struct MeuSolution {
  ExpectationValue value;
  Policy policy;
  BbStats stats;
  bool feasible = true;
  std::string dot;
};

struct SolveOptions {
  BbOptions bb;
  std::vector<std::string> order;
  bool want_dot = false;
};

MeuSolution solve_meu(const std::string& source, const SolveOptions& opt = {});

}  // namespace meu::dappl
