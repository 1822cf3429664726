#include "meu/bench.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "meu/dappl.hpp"
#include "meu/pineappl.hpp"

namespace meu::bench {

namespace {

std::string fnv_hex(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Instance {
  int size;
  uint64_t seed;
};

BenchRow solve_one(const BenchSpec& spec, const Instance& in) {
  BenchRow row;
  row.family = spec.family;
  row.seed = in.seed;
  row.size = in.size;
  auto start = std::chrono::steady_clock::now();
  try {
    std::string src;
    bool is_dappl = true;
    std::ostringstream params;
    if (spec.family == "dr") {
      params << "n=" << in.size;
      src = gen::gen_dr(in.size, in.seed);
    } else if (spec.family == "ladder") {
      params << "n=" << in.size << ";k=" << spec.k;
      src = gen::gen_ladder(in.size, spec.k, in.seed);
    } else if (spec.family == "gridworld") {
      params << "dim=" << in.size << ";horizon=" << spec.horizon << ";p=" << spec.p;
      src = gen::gen_gridworld(in.size, spec.horizon, spec.p, in.seed);
    } else if (spec.family == "nested-mmap") {
      params << "n=" << in.size;
      src = gen::gen_nested_mmap(in.size);
      is_dappl = false;
    } else if (spec.family == "bn") {
      params << "strategy=" << (spec.strategy == gen::UtilityStrategy::existing ? "existing" : "new_nodes");
      src = gen::gen_bn(gen::parse_bayes_net(spec.bn_json), spec.strategy, in.seed);
    } else {
      throw Error(ErrorKind::usage, "unknown benchmark family '" + spec.family + "'");
    }
    row.params = params.str();
    if (is_dappl) {
      dappl::SolveOptions opt;
      opt.bb.prune = spec.prune;
      opt.bb.timeout_ms = spec.timeout_ms;
      auto sol = dappl::solve_meu(src, opt);
      row.value = sol.value.util;
      std::string pol;
      for (auto& [k, v] : sol.policy) pol += k + "=" + v + ";";
      row.policy_hash = fnv_hex(pol);
      row.nodes = sol.stats.nodes_created;
      row.prunes = sol.stats.prunes;
      row.status = sol.stats.timed_out ? "timeout" : "ok";
    } else {
      pineappl::RunOptions opt;
      opt.bb.prune = spec.prune;
      opt.bb.timeout_ms = spec.timeout_ms;
      auto out = pineappl::run(src, opt);
      row.value = out.queries.empty() ? 0 : out.queries.back().value;
      std::string dec;
      for (auto& s : out.staged)
        for (auto& [k, v] : s.assignment) dec += k + "=" + (v ? "1" : "0") + ";";
      row.policy_hash = fnv_hex(dec);
      row.nodes = out.stats.nodes_created;
      row.prunes = out.stats.prunes;
      row.status = "ok";
    }
  } catch (const Error& e) {
    row.status = std::string(e.what()).find("timed out") != std::string::npos ? "timeout" : std::string("error: ") + e.what();
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  row.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::vector<BenchRow> run(const BenchSpec& spec) {
  std::vector<Instance> todo;
  if (spec.family == "bn") {
    if (spec.bn_json.empty()) throw Error(ErrorKind::usage, "bn benchmark needs a network");
    for (int s = spec.lo; s <= spec.hi; ++s) todo.push_back({0, static_cast<uint64_t>(s)});
  } else {
    for (int n = spec.lo; n <= spec.hi; ++n)
      for (int s = 0; s < spec.seeds; ++s) todo.push_back({n, spec.seed + static_cast<uint64_t>(s)});
  }
  std::vector<BenchRow> rows(todo.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < todo.size();) rows[i] = solve_one(spec, todo[i]);
  };
  int threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::string to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "family,params,seed,value,policy_hash,nodes,prunes,time_ms,status\n";
  for (auto& r : rows) {
    os << csv_field(r.family) << ',' << csv_field(r.params) << ',' << r.seed << ',' << r.value << ','
       << r.policy_hash << ',' << r.nodes << ',' << r.prunes << ',' << r.time_ms << ',' << csv_field(r.status)
       << '\n';
  }
  return os.str();
}

Fit poly_fit(const std::vector<double>& xs, const std::vector<double>& ys, int degree) {
  if (xs.size() != ys.size() || xs.empty()) throw Error(ErrorKind::usage, "poly_fit needs matching samples");
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int d = 0; d <= degree; ++d) a(i, d) = std::pow(xs[static_cast<size_t>(i)], d);
    b(i) = ys[static_cast<size_t>(i)];
  }
  Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  Fit f;
  f.coef.assign(c.data(), c.data() + c.size());
  double mean = b.mean();
  double ss_tot = (b.array() - mean).square().sum();
  double ss_res = (a * c - b).squaredNorm();
  f.r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace meu::bench
