#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "meu/oracle.hpp"
#include "meu/pineappl.hpp"
#include "support/random.hpp"

using namespace meu;
using namespace meu::pineappl;

namespace {

std::string program(const std::string& name) {
  std::ifstream in(std::string(MEU_SOURCE_DIR) + "/programs/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* loop_program = "a = flip 0.5;\nloop 3 {\n  tmp = flip 0.1;\n  a = a || tmp;\n}\npr(a)\n";

const char* if_loop_program =
    "x = flip 0.5;\ny = flip 0.5;\n"
    "if x {\n  loop 2 {\n    tmp = flip 0.3;\n    y = y && tmp;\n  }\n}\n"
    "else {\n  loop 3 {\n    tmp = flip 0.7;\n    y = y || tmp;\n  }\n}\npr(y)\n";

void collect(const std::vector<Stmt>& body, std::vector<std::string>& out) {
  for (auto& s : body) {
    out.insert(out.end(), s.targets.begin(), s.targets.end());
    collect(s.then_body, out);
    collect(s.else_body, out);
  }
}

std::vector<std::string> bound_names(const Program& p) {
  std::vector<std::string> out;
  collect(p.body, out);
  return out;
}

}  // namespace

TEST_SUITE("pineappl") {
  TEST_CASE("parse the diagnosis program") {
    auto p = parse(program("diagnosis.pineappl"));
    CHECK(p.queries.size() == 1);
    int mmaps = 0;
    for (auto& s : p.body) mmaps += s.kind == SKind::mmap && s.evidence != nullptr;
    CHECK(mmaps == 1);
  }

  TEST_CASE("mmap-bound names cannot be evidence") {
    CHECK_THROWS_AS(run("x = flip 0.5\nm = mmap(x)\npr(x) with { m }\n"), Error);
  }

  TEST_CASE("queries over nothing are constant") {
    auto out = run("pr(tt)");
    REQUIRE(out.queries.size() == 1);
    CHECK(out.queries[0].value == 1);
  }

  TEST_CASE("loop expansion renames every iteration") {
    auto e = expand(desugar(parse(loop_program)));
    auto names = bound_names(e);
    CHECK(names.size() == 7);
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
    // The query reads the last iterate.
    CHECK(to_string(e.queries[0].expr) == names.back());
    auto want = oracle::pineappl_interp(parse(loop_program));
    CHECK(near(run(e).queries[0].value, want.queries[0].value, 1e-12));
    CHECK(near(want.queries[0].value, 1 - 0.5 * 0.9 * 0.9 * 0.9, 1e-12));
  }

  TEST_CASE("a single iteration only renames") {
    auto e = expand(desugar(parse("a = flip 0.5\nloop 1 { a = !a }\npr(a)")));
    CHECK(bound_names(e).size() == 2);
  }

  TEST_CASE("branches with loops get join points") {
    auto e = expand(desugar(parse(if_loop_program)));
    // Names are unique along every path; sibling branches may share one.
    std::set<std::string> outer;
    for (auto& st : e.body)
      for (auto& t : st.targets) CHECK(outer.insert(t).second);
    for (auto* br : {&e.body[2].then_body, &e.body[2].else_body}) {
      std::set<std::string> seen = outer;
      for (auto& st : *br) CHECK(seen.insert(st.targets[0]).second);
    }
    // x, y, the if, then the joins for tmp and y.
    REQUIRE(e.body.size() == 5);
    CHECK(e.body[2].kind == SKind::if_);
    CHECK(e.body[2].then_body.size() == 4);
    CHECK(e.body[2].else_body.size() == 6);
    std::string join = to_string(e.body[4].expr);
    CHECK(join.find("x && " + e.body[2].then_body[3].targets[0]) != std::string::npos);
    CHECK(join.find("!x && " + e.body[2].else_body[5].targets[0]) != std::string::npos);
    CHECK(to_string(e.queries[0].expr) == e.body[4].targets[0]);
    CHECK(near(run(if_loop_program).queries[0].value,
               oracle::pineappl_interp(parse(if_loop_program)).queries[0].value, 1e-12));
  }

  TEST_CASE("loop bound must be positive") {
    CHECK_THROWS_AS(run("a = flip 0.5\nloop 0 { a = !a }\npr(a)"), Error);
  }

  TEST_CASE("constraint for the first three lines") {
    BddManager mgr;
    auto p = expand(desugar(parse("disease = flip 0.5;\nif disease { headache = flip 0.7; }\nelse { headache = flip 0.1; }\npr(headache)")));
    auto st = compile_program(mgr, p);
    // Pr(headache) = 0.5 * 0.7 + 0.5 * 0.1.
    // headache is bound in both branches; the query reads the join.
    Bdd h = mgr.mk_var(st.vars.at(p.queries[0].expr->name));
    double z = mgr.amc(st.constraint, st.weights);
    CHECK(near(mgr.amc(mgr.and_(st.constraint, h), st.weights) / z, 0.4, 1e-12));
    Bdd d = mgr.mk_var(st.vars.at("disease"));
    CHECK(near(mgr.amc(mgr.and_(st.constraint, mgr.and_(d, h)), st.weights) / z, 0.35, 1e-12));
  }

  TEST_CASE("if with both branches assigning one name") {
    BddManager mgr;
    auto p = expand(desugar(parse("g = flip 0.3\nif g { z = flip 0.9 } else { z = flip 0.2 }\npr(z)")));
    auto st = compile_program(mgr, p);
    Bdd g = mgr.mk_var(st.vars.at("g")), z = mgr.mk_var(st.vars.at(p.queries[0].expr->name));
    auto pr = [&](Bdd q, Bdd e) {
      return mgr.amc(mgr.and_(st.constraint, mgr.and_(q, e)), st.weights) /
             mgr.amc(mgr.and_(st.constraint, e), st.weights);
    };
    CHECK(near(pr(z, g), 0.9, 1e-12));
    CHECK(near(pr(z, mgr.negate(g)), 0.2, 1e-12));
  }

  TEST_CASE("diagnosis") {
    auto out = run(program("diagnosis.pineappl"));
    REQUIRE(out.staged.size() == 1);
    CHECK(out.staged[0].assignment == std::vector<std::pair<std::string, bool>>{{"diagnosis", true}});
    CHECK(near(out.staged[0].posterior, 0.875, 1e-12));
    REQUIRE(out.queries.size() == 1);
    CHECK(out.queries[0].query == "pr(complications)");
    CHECK(near(out.queries[0].value, 0.2, 1e-12));
  }

  TEST_CASE("terminal mmap query") {
    auto out = run("disease = flip 0.5;\nif disease { headache = flip 0.7; } else { headache = flip 0.1; }\nmmap(disease) with { headache }\n");
    REQUIRE(out.terminal.has_value());
    CHECK(out.terminal->assignment == std::vector<std::pair<std::string, bool>>{{"disease", true}});
    CHECK(near(out.terminal->posterior, 0.875, 1e-12));
  }

  TEST_CASE("mmap over a deterministic variable") {
    auto out = run("x = tt\nm = mmap(x)\npr(m)");
    REQUIRE(out.staged.size() == 1);
    CHECK(out.staged[0].assignment[0].second);
    CHECK(near(out.staged[0].posterior, 1, 1e-12));
  }

  TEST_CASE("zero-probability evidence is a solve error") {
    try {
      run("x = flip 0.5\npr(x) with { x && !x }");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::solve);
    }
  }

  TEST_CASE("random programs agree with the interpreter, staged decisions included") {
    testing::Rng rng(55);
    for (int i = 0; i < 100; ++i) {
      std::string src = testing::random_pineappl(rng);
      Outcome got, want;
      bool a = true, b = true;
      try {
        got = run(src);
      } catch (const Error&) {
        a = false;
      }
      try {
        want = oracle::pineappl_interp(parse(src));
      } catch (const Error&) {
        b = false;
      }
      CHECK(a == b);
      if (!a || !b) continue;
      REQUIRE(got.staged.size() == want.staged.size());
      for (size_t s = 0; s < got.staged.size(); ++s) CHECK(near(got.staged[s].posterior, want.staged[s].posterior, 1e-9));
      for (size_t q = 0; q < got.queries.size(); ++q) CHECK(near(got.queries[q].value, want.queries[q].value, 1e-9));
    }
  }
}
