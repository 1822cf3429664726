// Exercises the shared library through its C interface and the CLI binary.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"
#include "meu.h"

using nlohmann::json;

namespace {

std::string read(const std::string& rel) {
  std::ifstream in(std::string(MEU_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Session {
  meu_session* s = meu_session_new();
  ~Session() { meu_session_free(s); }
};

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  std::string cmd = std::string(MEU_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp_file(const std::string& name, const std::string& text) {
  std::string path = std::string(MEU_BINARY_DIR) + "/" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("solve dappl") {
    Session x;
    REQUIRE(meu_solve(x.s, "dappl", read("programs/umbrella.dappl").c_str()) == MEU_OK);
    auto j = json::parse(meu_result_json(x.s));
    CHECK(j["meu"].get<double>() == doctest::Approx(-3.5).epsilon(1e-12));
    CHECK(j["policy"] == json{{"c0", "Umb"}});
    CHECK(std::string(meu_last_error(x.s)).empty());
  }

  TEST_CASE("solve pineappl") {
    Session x;
    REQUIRE(meu_solve(x.s, "pineappl", read("programs/diagnosis.pineappl").c_str()) == MEU_OK);
    auto j = json::parse(meu_result_json(x.s));
    REQUIRE(j.is_array());
    CHECK(j[0]["query"] == "pr(complications)");
    CHECK(j[0]["value"].get<double>() == doctest::Approx(0.2).epsilon(1e-12));
  }

  TEST_CASE("oracle and stats") {
    Session x;
    CHECK(meu_set_option(x.s, "oracle", "on") == MEU_OK);
    CHECK(meu_set_option(x.s, "stats", "on") == MEU_OK);
    REQUIRE(meu_solve(x.s, "dappl", read("programs/umbrella_observe.dappl").c_str()) == MEU_OK);
    auto j = json::parse(meu_result_json(x.s));
    CHECK(j["delta"].get<double>() < 1e-9);
    CHECK(j["stats"].contains("prunes"));
  }

  TEST_CASE("error codes") {
    Session x;
    CHECK(meu_solve(x.s, "dappl", "x <- flip 2; return x") == MEU_ERR_INPUT);
    auto e = json::parse(meu_last_error(x.s));
    CHECK(e["error"]["kind"] == "input");
    CHECK(e["error"]["line"] == 1);
    CHECK(meu_solve(x.s, "cobol", "") == MEU_ERR_USAGE);
    CHECK(meu_set_option(x.s, "prune", "maybe") == MEU_ERR_USAGE);
    CHECK(meu_set_option(x.s, "colour", "on") == MEU_ERR_USAGE);
    CHECK(meu_solve(x.s, "pineappl", "x = flip 0.5\npr(x) with { x && !x }") == MEU_ERR_SOLVE);
    CHECK(meu_solve(nullptr, "dappl", "") == MEU_ERR_USAGE);
    CHECK(meu_generate(x.s, "bn", "{}") == MEU_ERR_USAGE);
    CHECK(meu_bench(x.s, "{not json") == MEU_ERR_USAGE);
  }

  TEST_CASE("dot") {
    Session x;
    meu_set_option(x.s, "dot", "on");
    REQUIRE(meu_solve(x.s, "dappl", read("programs/umbrella.dappl").c_str()) == MEU_OK);
    CHECK(std::string(meu_dot(x.s)).rfind("digraph", 0) == 0);
  }

  TEST_CASE("generate is deterministic") {
    Session x;
    json p = {{"network", read("programs/networks/asia.json")}, {"seed", 3}, {"strategy", "new-nodes"}};
    REQUIRE(meu_generate(x.s, "bn", p.dump().c_str()) == MEU_OK);
    std::string a = meu_result_json(x.s);
    REQUIRE(meu_generate(x.s, "bn", p.dump().c_str()) == MEU_OK);
    CHECK(a == meu_result_json(x.s));
  }

  TEST_CASE("bench summary") {
    Session x;
    REQUIRE(meu_bench(x.s, R"({"family":"nested-mmap","lo":2,"hi":8})") == MEU_OK);
    auto s = json::parse(meu_bench_summary(x.s));
    CHECK(s["rows"] == 7);
    CHECK(s["failed"] == 0);
    CHECK(s["fit"]["r2"].is_number());
    std::string csv = meu_result_json(x.s);
    CHECK(csv.rfind("family,params,seed", 0) == 0);
  }

  TEST_CASE("version") { CHECK(std::string(meu_version()) == "0.1.0"); }
}

TEST_SUITE("cli") {
  TEST_CASE("solve") {
    auto r = cli("solve " + std::string(MEU_SOURCE_DIR) + "/programs/umbrella.dappl");
    CHECK(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["meu"].get<double>() == doctest::Approx(-3.5));
    CHECK(j["policy"]["c0"] == "Umb");
    r = cli("solve " + std::string(MEU_SOURCE_DIR) + "/programs/diagnosis.pineappl");
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)[0]["value"].get<double>() == doctest::Approx(0.2));
  }

  TEST_CASE("exit codes") {
    CHECK(cli("solve").code == 1);
    CHECK(cli("solve /nonexistent/file.dappl").code == 2);
    auto r = cli("solve " + temp_file("bad.dappl", "x <- flip 0.5;\nreturn y"));
    CHECK(r.code == 2);
    CHECK(json::parse(r.out)["error"]["line"] == 2);
    CHECK(cli("solve " + temp_file("zero.pineappl", "x = flip 0.5\npr(x) with { x && !x }")).code == 3);
  }

  TEST_CASE("gen pipes into solve --oracle") {
    std::string path = std::string(MEU_BINARY_DIR) + "/ladder.dappl";
    CHECK(cli("gen ladder 2 2 --seed 4 -o " + path).code == 0);
    auto r = cli("solve --oracle " + path);
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["delta"].get<double>() < 1e-9);
    auto piped = cli("solve --lang dappl - < " + path);
    CHECK(piped.code == 0);
    CHECK(json::parse(piped.out)["meu"] == json::parse(r.out)["meu"]);
  }

  TEST_CASE("bench writes csv") {
    auto r = cli("bench dr --range 1..3");
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
  }
}
