#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "meu/bbir.hpp"
#include "meu/error.hpp"

namespace meu::pineappl {

enum class EKind { var, tt, ff, and_, or_, not_, is };

struct PExpr;
using PExprPtr = std::shared_ptr<const PExpr>;

struct PExpr {
  EKind kind = EKind::tt;
  Span span;
  std::string name;  // var; categorical variable of `is`
  std::string alt;   // outcome of `is`
  std::vector<PExprPtr> kids;
};

enum class SKind { assign, flip, disc, if_, mmap, loop };

struct Stmt {
  SKind kind = SKind::assign;
  Span span;
  std::vector<std::string> targets;  // one for assign/flip/disc; mmap results
  std::vector<std::string> args;     // mmap arguments
  PExprPtr expr;                     // assign value, if guard
  PExprPtr evidence;                 // mmap `with`
  double theta = 0;
  std::vector<std::string> alts;     // disc outcomes
  std::vector<double> probs;
  int count = 0;                     // loop bound
  std::vector<Stmt> then_body, else_body;  // if; loop body in then_body
};

struct Query {
  enum Kind { pr, mmap } kind = pr;
  Span span;
  PExprPtr expr;
  PExprPtr evidence;
  std::vector<std::string> args;
  std::string text;
};

struct Program {
  std::vector<Stmt> body;
  std::vector<Query> queries;
};

std::string to_string(const PExprPtr& e);
std::string to_string(const Program& p);

Program parse(const std::string& source);

// Rewrites disc/is into Boolean indicators.
Program desugar(const Program& p);

// Unrolls loops and renames every rebinding to a fresh name; an if whose
// branches leave a name at different versions gets a join assignment
// `x_j = (g && a) || (!g && b)` right after it. Names bound in only one branch
// (with no earlier binding) are local to that branch.
Program expand(const Program& p);

struct QueryResult {
  std::string query;
  double value = 0;
};

struct MmapResult {
  std::vector<std::pair<std::string, bool>> assignment;
  double posterior = 0;
};

struct Outcome {
  std::vector<QueryResult> queries;
  // Staged mmap statements in compilation order; the assignment is keyed by
  // the bound (result) names.
  std::vector<MmapResult> staged;
  std::optional<MmapResult> terminal;  // keyed by the argument names
  BbStats stats;          // accumulated over every mmap solve
  size_t constraint_nodes = 0;
  std::string dot;
};

struct RunOptions {
  BbOptions bb;
  std::vector<std::string> order;
  bool want_dot = false;
};

Outcome run(const std::string& source, const RunOptions& opt = {});
Outcome run(const Program& expanded, const RunOptions& opt = {});

// One staged compile step exposed for tests: the constraint over the program
// variables and the weights after compiling `expanded` (queries ignored).
struct CompileState {
  std::vector<std::pair<VarId, Bdd>> defs;
  Bdd constraint;
  WeightMap<RealSemiring> weights;
  std::map<std::string, VarId> vars;
};
CompileState compile_program(BddManager& mgr, const Program& expanded, const RunOptions& opt = {},
                             Outcome* out = nullptr);

}  // namespace meu::pineappl
