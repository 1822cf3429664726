// meu-cli: command-line front end over the C API in libmeu.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "meu.h"

using nlohmann::json;

namespace {

enum Exit { exit_ok = 0, exit_usage = 1, exit_input = 2, exit_solve = 3 };

bool use_color() {
  const char* nc = std::getenv("NO_COLOR");
  return (!nc || !*nc) && isatty(fileno(stderr));
}

// Structured JSON on stdout, a short human line on stderr.
int report(int code, const std::string& error_json) {
  json e;
  try {
    e = json::parse(error_json);
  } catch (...) {
    e = {{"error", {{"kind", "usage"}, {"code", code}, {"message", error_json}}}};
  }
  std::cout << e.dump() << "\n";
  auto& inner = e["error"];
  std::string where;
  if (inner.contains("line")) where = " at " + std::to_string(inner["line"].get<int>()) + ":" + std::to_string(inner["column"].get<int>());
  std::string kind = inner.value("kind", "error");
  if (use_color())
    std::cerr << "\033[1;31m" << kind << " error\033[0m" << where << ": " << inner.value("message", "") << "\n";
  else
    std::cerr << kind << " error" << where << ": " << inner.value("message", "") << "\n";
  return code;
}

int usage_error(const std::string& msg) {
  return report(exit_usage, json{{"error", {{"kind", "usage"}, {"code", 1}, {"message", msg}}}}.dump());
}

struct Fail {
  int code;
  std::string json;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Fail{exit_input, json{{"error", {{"kind", "input"}, {"code", 2}, {"message", "cannot read " + path}}}}.dump()};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw Fail{exit_usage, json{{"error", {{"kind", "usage"}, {"code", 1}, {"message", "cannot write " + path}}}}.dump()};
}

using Session = std::unique_ptr<meu_session, decltype(&meu_session_free)>;

void check(meu_session* s, meu_status st) {
  if (st != MEU_OK) throw Fail{static_cast<int>(st), meu_last_error(s)};
}

std::string detect_lang(const std::string& file, const std::string& lang) {
  if (!lang.empty()) return lang;
  auto ends = [&](const char* ext) {
    std::string e = ext;
    return file.size() >= e.size() && file.compare(file.size() - e.size(), e.size(), e) == 0;
  };
  if (ends(".dappl")) return "dappl";
  if (ends(".pineappl")) return "pineappl";
  throw Fail{exit_usage, json{{"error", {{"kind", "usage"}, {"code", 1},
                                    {"message", "cannot infer language of " + file + "; pass --lang"}}}}
                        .dump()};
}

struct SolveArgs {
  std::string file, lang, dot, order, heuristic = "registration";
  bool oracle = false, no_prune = false, stats = false;
  double timeout = 0;
};

void configure(meu_session* s, const SolveArgs& a, bool want_dot) {
  check(s, meu_set_option(s, "prune", a.no_prune ? "off" : "on"));
  check(s, meu_set_option(s, "heuristic", a.heuristic.c_str()));
  check(s, meu_set_option(s, "timeout_ms", std::to_string(a.timeout).c_str()));
  check(s, meu_set_option(s, "oracle", a.oracle ? "on" : "off"));
  check(s, meu_set_option(s, "stats", a.stats ? "on" : "off"));
  check(s, meu_set_option(s, "dot", want_dot ? "on" : "off"));
  if (!a.order.empty()) check(s, meu_set_option(s, "order", read_file(a.order).c_str()));
}

int cmd_solve(const SolveArgs& a) {
  Session s(meu_session_new(), meu_session_free);
  configure(s.get(), a, !a.dot.empty());
  std::string src = read_file(a.file);
  check(s.get(), meu_solve(s.get(), detect_lang(a.file, a.lang).c_str(), src.c_str()));
  if (!a.dot.empty()) write_file(a.dot, meu_dot(s.get()));
  std::cout << meu_result_json(s.get()) << "\n";
  return exit_ok;
}

int cmd_dot(const SolveArgs& a) {
  Session s(meu_session_new(), meu_session_free);
  configure(s.get(), a, true);
  std::string src = read_file(a.file);
  check(s.get(), meu_solve(s.get(), detect_lang(a.file, a.lang).c_str(), src.c_str()));
  std::cout << meu_dot(s.get());
  return exit_ok;
}

struct GenArgs {
  std::string family, network, strategy = "existing", out;
  int n = 1, k = 1, dim = 3, horizon = 1;
  double p = 0.1;
  uint64_t seed = 0;
};

int cmd_gen(const GenArgs& a) {
  Session s(meu_session_new(), meu_session_free);
  json params = {{"n", a.n}, {"k", a.k}, {"dim", a.dim}, {"horizon", a.horizon}, {"p", a.p},
                 {"seed", a.seed}, {"strategy", a.strategy}};
  if (a.family == "bn") params["network"] = read_file(a.network);
  check(s.get(), meu_generate(s.get(), a.family.c_str(), params.dump().c_str()));
  if (a.out.empty()) std::cout << meu_result_json(s.get());
  else write_file(a.out, meu_result_json(s.get()));
  return exit_ok;
}

struct BenchArgs {
  std::string family, range = "1..1", network, strategy = "existing", csv;
  int seeds = 1, k = 1, horizon = 1, threads = 1, degree = 2;
  double p = 0.1, timeout = 0;
  uint64_t seed = 0;
  bool no_prune = false;
};

int cmd_bench(const BenchArgs& a) {
  int lo = 0, hi = -1;
  auto dots = a.range.find("..");
  try {
    if (dots == std::string::npos) {
      lo = hi = std::stoi(a.range);
    } else {
      lo = std::stoi(a.range.substr(0, dots));
      hi = std::stoi(a.range.substr(dots + 2));
    }
  } catch (const std::exception&) {
    return usage_error("bad --range '" + a.range + "', expected LO..HI");
  }
  json spec = {{"family", a.family}, {"lo", lo}, {"hi", hi}, {"k", a.k}, {"horizon", a.horizon},
               {"p", a.p}, {"seed", a.seed}, {"seeds", a.seeds}, {"strategy", a.strategy},
               {"timeout_ms", a.timeout}, {"threads", a.threads}, {"prune", !a.no_prune},
               {"fit_degree", a.degree}};
  if (!a.network.empty()) spec["network"] = read_file(a.network);
  Session s(meu_session_new(), meu_session_free);
  check(s.get(), meu_bench(s.get(), spec.dump().c_str()));
  if (a.csv.empty()) std::cout << meu_result_json(s.get());
  else write_file(a.csv, meu_result_json(s.get()));
  json summary = json::parse(meu_bench_summary(s.get()));
  std::cerr << summary["rows"] << " rows, " << summary["failed"] << " not ok";
  if (!summary["fit"].is_null()) std::cerr << "; degree-" << summary["fit"]["degree"] << " fit r2 = " << summary["fit"]["r2"];
  std::cerr << "\n";
  return exit_ok;
}

void add_solve_flags(CLI::App* c, SolveArgs& a) {
  c->add_option("file", a.file, "program file (.dappl or .pineappl), or - for stdin with --lang")->required();
  c->add_option("--lang", a.lang, "dappl or pineappl; overrides the extension")->check(CLI::IsMember({"dappl", "pineappl"}));
  c->add_option("--order", a.order, "file listing BDD variable labels in the desired order");
  c->add_flag("--no-prune", a.no_prune, "disable branch-and-bound pruning");
  c->add_option("--heuristic", a.heuristic, "branching order")->check(CLI::IsMember({"registration", "largest-gap"}));
  c->add_option("--timeout", a.timeout, "search time limit in ms (0 = none)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum expected utility and marginal MAP solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(meu_version()));

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "solve a program and print JSON");
  add_solve_flags(solve, sa);
  solve->add_option("--dot", sa.dot, "write the compiled BDD as Graphviz to PATH");
  solve->add_flag("--oracle", sa.oracle, "also run the enumeration oracle and report both");
  solve->add_flag("--stats", sa.stats, "include search statistics");

  SolveArgs da;
  auto* dot = app.add_subcommand("dot", "print the compiled BDD as Graphviz");
  add_solve_flags(dot, da);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "generate a benchmark program");
  gen->require_subcommand(1);
  gen->add_option("-o,--output", ga.out, "write to PATH instead of stdout");
  auto* g_bn = gen->add_subcommand("bn", "decision program from a Bayesian network JSON");
  g_bn->add_option("network", ga.network, "network JSON file")->required();
  g_bn->add_option("--strategy", ga.strategy, "utility strategy")->check(CLI::IsMember({"existing", "new-nodes"}));
  auto* g_dr = gen->add_subcommand("dr", "decision-rich chain of coins");
  g_dr->add_option("n", ga.n, "number of coins")->required();
  auto* g_ladder = gen->add_subcommand("ladder", "ladder network with k attempts");
  g_ladder->add_option("n", ga.n, "rungs")->required();
  g_ladder->add_option("k", ga.k, "attempts")->default_val(1);
  auto* g_grid = gen->add_subcommand("gridworld", "finite-horizon gridworld");
  g_grid->add_option("dim", ga.dim, "grid side")->required();
  g_grid->add_option("horizon", ga.horizon, "steps")->required();
  g_grid->add_option("p", ga.p, "slip probability")->default_val(0.1);
  auto* g_nested = gen->add_subcommand("nested-mmap", "pineappl program with n staged mmap calls");
  g_nested->add_option("n", ga.n, "loop bound")->required();
  for (auto* sub : {g_bn, g_dr, g_ladder, g_grid, g_nested}) {
    sub->add_option("--seed", ga.seed, "generator seed");
    sub->add_option("-o,--output", ga.out, "write to PATH instead of stdout");
    sub->callback([&ga, sub] { ga.family = sub->get_name(); });
  }

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "run a benchmark family and emit CSV");
  bench->add_option("family", ba.family, "bn | dr | ladder | gridworld | nested-mmap")->required()
      ->check(CLI::IsMember({"bn", "dr", "ladder", "gridworld", "nested-mmap"}));
  bench->add_option("--range", ba.range, "size range LO..HI (seed range for bn)");
  bench->add_option("--seeds", ba.seeds, "instances per size");
  bench->add_option("--seed", ba.seed, "first seed");
  bench->add_option("--k", ba.k, "ladder attempts");
  bench->add_option("--horizon", ba.horizon, "gridworld horizon");
  bench->add_option("--p", ba.p, "gridworld slip probability");
  bench->add_option("--bn", ba.network, "Bayesian network JSON for the bn family");
  bench->add_option("--strategy", ba.strategy, "bn utility strategy")->check(CLI::IsMember({"existing", "new-nodes"}));
  bench->add_option("--csv", ba.csv, "write CSV to PATH instead of stdout");
  bench->add_option("--timeout", ba.timeout, "per-instance time limit in ms");
  bench->add_option("--threads", ba.threads, "worker threads");
  bench->add_option("--fit-degree", ba.degree, "degree of the time-vs-size fit");
  bench->add_flag("--no-prune", ba.no_prune, "disable pruning");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return usage_error(e.what());
  }

  try {
    if (*solve) return cmd_solve(sa);
    if (*dot) return cmd_dot(da);
    if (*gen) return cmd_gen(ga);
    if (*bench) return cmd_bench(ba);
  } catch (const Fail& f) {
    return report(f.code, f.json);
  } catch (const std::exception& e) {
    return report(exit_solve, json{{"error", {{"kind", "solve"}, {"code", 3}, {"message", e.what()}}}}.dump());
  }
  return usage_error("no command");
}
