#include <cmath>
#include <sstream>

#include "json.hpp"
#include "meu.h"
#include "meu/bench.hpp"
#include "meu/dappl.hpp"
#include "meu/gen.hpp"
#include "meu/oracle.hpp"
#include "meu/pineappl.hpp"

using nlohmann::json;

struct meu_session {
  meu::BbOptions bb;
  std::vector<std::string> order;
  bool dot = false;
  bool oracle = false;
  bool stats = false;
  std::string result, dot_text, error, summary;
};

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json stats_json(const meu::BbStats& s) {
  return {{"nodes", s.nodes_created}, {"bound_calls", s.bound_calls}, {"prunes", s.prunes},
          {"base_cases", s.base_cases}, {"infeasible", s.infeasible}, {"elapsed_ms", s.elapsed_ms},
          {"timed_out", s.timed_out}};
}

bool parse_flag(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw meu::Error(meu::ErrorKind::usage, "expected on/off, got '" + v + "'");
}

json assignment_json(const std::vector<std::pair<std::string, bool>>& a) {
  json o = json::object();
  for (auto& [k, v] : a) o[k] = v;
  return o;
}

json pineappl_list(const meu::pineappl::Outcome& out, const std::vector<meu::pineappl::Query>& queries) {
  json list = json::array();
  for (auto& q : out.queries) list.push_back({{"query", q.query}, {"value", q.value}});
  if (out.terminal) {
    std::string text;
    for (auto& q : queries)
      if (q.kind == meu::pineappl::Query::mmap) text = q.text;
    list.push_back({{"query", text}, {"value", assignment_json(out.terminal->assignment)},
                    {"posterior", out.terminal->posterior}});
  }
  return list;
}

std::string solve_dappl(meu_session* s, const std::string& src) {
  meu::dappl::SolveOptions opt;
  opt.bb = s->bb;
  opt.order = s->order;
  opt.want_dot = s->dot;
  auto sol = meu::dappl::solve_meu(src, opt);
  if (sol.stats.timed_out) meu::solve_error("search timed out after " + std::to_string(s->bb.timeout_ms) + " ms");
  json out = {{"meu", number_or_null(sol.value.util)}, {"policy", sol.policy}};
  if (!sol.feasible) out["feasible"] = false;
  if (s->stats) out["stats"] = stats_json(sol.stats);
  if (s->oracle) {
    auto o = meu::oracle::dappl_meu_enum(meu::dappl::desugar(meu::dappl::parse(src)));
    out["oracle"] = {{"meu", number_or_null(o.eu)}, {"policy", o.policy}};
    double d = sol.value.util == o.eu ? 0.0 : std::fabs(sol.value.util - o.eu);
    out["delta"] = number_or_null(d);
  }
  s->dot_text = sol.dot;
  return out.dump();
}

std::string solve_pineappl(meu_session* s, const std::string& src) {
  meu::pineappl::RunOptions opt;
  opt.bb = s->bb;
  opt.order = s->order;
  opt.want_dot = s->dot;
  auto parsed = meu::pineappl::parse(src);
  auto out = meu::pineappl::run(meu::pineappl::expand(meu::pineappl::desugar(parsed)), opt);
  s->dot_text = out.dot;
  json list = pineappl_list(out, parsed.queries);
  if (!s->stats && !s->oracle) return list.dump();
  json obj = {{"results", list}};
  json decisions = json::array();
  for (auto& st : out.staged)
    decisions.push_back({{"bindings", assignment_json(st.assignment)}, {"posterior", st.posterior}});
  obj["decisions"] = decisions;
  if (s->stats) {
    obj["stats"] = stats_json(out.stats);
    obj["stats"]["constraint_nodes"] = out.constraint_nodes;
  }
  if (s->oracle) {
    auto o = meu::oracle::pineappl_interp(parsed);
    obj["oracle"] = pineappl_list(o, parsed.queries);
    double delta = 0;
    for (size_t i = 0; i < o.queries.size() && i < out.queries.size(); ++i)
      delta = std::max(delta, std::fabs(o.queries[i].value - out.queries[i].value));
    obj["delta"] = delta;
  }
  return obj.dump();
}

std::string generate(const std::string& family, const json& p) {
  uint64_t seed = p.value("seed", uint64_t{0});
  if (family == "dr") return meu::gen::gen_dr(p.value("n", 1), seed);
  if (family == "ladder") return meu::gen::gen_ladder(p.value("n", 1), p.value("k", 1), seed);
  if (family == "gridworld")
    return meu::gen::gen_gridworld(p.value("dim", 3), p.value("horizon", 1), p.value("p", 0.1), seed);
  if (family == "nested-mmap") return meu::gen::gen_nested_mmap(p.value("n", 2));
  if (family == "bn") {
    std::string strategy = p.value("strategy", std::string("existing"));
    meu::gen::UtilityStrategy st;
    if (strategy == "existing") st = meu::gen::UtilityStrategy::existing;
    else if (strategy == "new-nodes" || strategy == "new_nodes") st = meu::gen::UtilityStrategy::new_nodes;
    else throw meu::Error(meu::ErrorKind::usage, "unknown utility strategy '" + strategy + "'");
    if (!p.contains("network")) throw meu::Error(meu::ErrorKind::usage, "bn needs a network");
    return meu::gen::gen_bn(meu::gen::parse_bayes_net(p["network"].get<std::string>()), st, seed);
  }
  throw meu::Error(meu::ErrorKind::usage, "unknown family '" + family + "'");
}

template <class F>
meu_status guarded(meu_session* s, F body) {
  if (!s) return MEU_ERR_USAGE;
  s->error.clear();
  auto fail = [&](meu::ErrorKind kind, const std::string& msg, meu::Span span) {
    static const char* names[] = {"", "usage", "input", "solve"};
    json e = {{"kind", names[static_cast<int>(kind)]}, {"code", static_cast<int>(kind)}, {"message", msg}};
    if (span.line > 0) {
      e["line"] = span.line;
      e["column"] = span.col;
    }
    s->error = json{{"error", e}}.dump();
    return static_cast<meu_status>(kind);
  };
  try {
    body();
    return MEU_OK;
  } catch (const meu::Error& e) {
    return fail(e.kind(), e.what(), e.span());
  } catch (const json::exception& e) {
    return fail(meu::ErrorKind::usage, e.what(), {});
  } catch (const std::bad_alloc&) {
    return fail(meu::ErrorKind::solve, "out of memory", {});
  } catch (const std::exception& e) {
    return fail(meu::ErrorKind::solve, e.what(), {});
  }
}

}  // namespace

extern "C" {

const char* meu_version(void) { return "0.1.0"; }

meu_session* meu_session_new(void) { return new (std::nothrow) meu_session(); }

void meu_session_free(meu_session* s) { delete s; }

meu_status meu_set_option(meu_session* s, const char* key, const char* value) {
  return guarded(s, [&] {
    if (!key || !value) throw meu::Error(meu::ErrorKind::usage, "option key and value are required");
    std::string k = key, v = value;
    if (k == "prune") s->bb.prune = parse_flag(v);
    else if (k == "dot") s->dot = parse_flag(v);
    else if (k == "oracle") s->oracle = parse_flag(v);
    else if (k == "stats") s->stats = parse_flag(v);
    else if (k == "heuristic") {
      if (v == "registration") s->bb.heuristic = meu::BranchHeuristic::registration;
      else if (v == "largest-gap" || v == "largest_gap") s->bb.heuristic = meu::BranchHeuristic::largest_gap;
      else throw meu::Error(meu::ErrorKind::usage, "unknown heuristic '" + v + "'");
    } else if (k == "timeout_ms") {
      char* end = nullptr;
      double t = std::strtod(v.c_str(), &end);
      if (end == v.c_str() || *end || t < 0) throw meu::Error(meu::ErrorKind::usage, "bad timeout '" + v + "'");
      s->bb.timeout_ms = t;
    } else if (k == "order") {
      s->order.clear();
      for (char& c : v)
        if (c == ',') c = ' ';
      std::istringstream is(v);
      for (std::string l; is >> l;) s->order.push_back(l);
    } else {
      throw meu::Error(meu::ErrorKind::usage, "unknown option '" + k + "'");
    }
  });
}

meu_status meu_solve(meu_session* s, const char* lang, const char* source) {
  return guarded(s, [&] {
    if (!lang || !source) throw meu::Error(meu::ErrorKind::usage, "language and source are required");
    std::string l = lang;
    s->result.clear();
    s->dot_text.clear();
    if (l == "dappl") s->result = solve_dappl(s, source);
    else if (l == "pineappl") s->result = solve_pineappl(s, source);
    else throw meu::Error(meu::ErrorKind::usage, "unknown language '" + l + "'");
  });
}

meu_status meu_generate(meu_session* s, const char* family, const char* params_json) {
  return guarded(s, [&] {
    if (!family) throw meu::Error(meu::ErrorKind::usage, "family is required");
    json p = params_json && *params_json ? json::parse(params_json) : json::object();
    s->result = generate(family, p);
  });
}

meu_status meu_bench(meu_session* s, const char* spec_json) {
  return guarded(s, [&] {
    json j = spec_json && *spec_json ? json::parse(spec_json) : json::object();
    meu::bench::BenchSpec spec;
    spec.family = j.value("family", std::string());
    spec.lo = j.value("lo", 1);
    spec.hi = j.value("hi", spec.lo);
    spec.k = j.value("k", 1);
    spec.horizon = j.value("horizon", 1);
    spec.p = j.value("p", 0.1);
    spec.seed = j.value("seed", uint64_t{0});
    spec.seeds = j.value("seeds", 1);
    spec.bn_json = j.value("network", std::string());
    std::string strategy = j.value("strategy", std::string("existing"));
    spec.strategy = strategy == "existing" ? meu::gen::UtilityStrategy::existing : meu::gen::UtilityStrategy::new_nodes;
    spec.timeout_ms = j.value("timeout_ms", 0.0);
    spec.threads = j.value("threads", 1);
    spec.prune = j.value("prune", true);
    if (spec.family.empty()) throw meu::Error(meu::ErrorKind::usage, "bench needs a family");
    auto rows = meu::bench::run(spec);
    s->result = meu::bench::to_csv(rows);
    int degree = j.value("fit_degree", 2);
    std::vector<double> xs, ys;
    size_t failed = 0;
    for (auto& r : rows) {
      if (r.status != "ok") {
        ++failed;
        continue;
      }
      xs.push_back(r.size);
      ys.push_back(r.time_ms);
    }
    json summary = {{"rows", rows.size()}, {"failed", failed}, {"fit", nullptr}};
    if (static_cast<int>(xs.size()) > degree) {
      auto fit = meu::bench::poly_fit(xs, ys, degree);
      summary["fit"] = {{"degree", degree}, {"coef", fit.coef}, {"r2", fit.r2}};
    }
    s->summary = summary.dump();
  });
}

const char* meu_bench_summary(const meu_session* s) { return s ? s->summary.c_str() : ""; }
const char* meu_result_json(const meu_session* s) { return s ? s->result.c_str() : ""; }
const char* meu_dot(const meu_session* s) { return s ? s->dot_text.c_str() : ""; }
const char* meu_last_error(const meu_session* s) { return s ? s->error.c_str() : ""; }

}  // extern "C"
