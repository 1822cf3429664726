#include "meu/gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "meu/error.hpp"

namespace meu::gen {

namespace {

// Shortest decimal that reads back as the same double.
std::string num(double x) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

std::string ident(const std::string& raw, const char* fallback) {
  static const std::set<std::string> reserved = {"if",   "then", "else", "choose", "with", "observe",
                                                 "reward", "loop", "return", "flip", "disc", "tt",
                                                 "ff",   "true", "false", "is", "pr", "mmap", "not"};
  std::string s;
  for (char c : raw) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) s = fallback + s;
  if (reserved.count(s)) s += "_";
  return s;
}

std::string conj(const std::vector<std::string>& xs) {
  if (xs.empty()) return "tt";
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) s += (i ? " && " : "") + xs[i];
  return xs.size() > 1 ? "(" + s + ")" : s;
}

std::string disj(const std::vector<std::string>& xs) {
  if (xs.empty()) return "ff";
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) s += (i ? " || " : "") + xs[i];
  return xs.size() > 1 ? "(" + s + ")" : s;
}

std::vector<size_t> topo_order(const BayesNet& bn) {
  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < bn.variables.size(); ++i) idx[bn.variables[i].name] = i;
  std::vector<int> mark(bn.variables.size(), 0);
  std::vector<size_t> out;
  std::function<void(size_t)> visit = [&](size_t i) {
    if (mark[i] == 2) return;
    if (mark[i] == 1) input_error("Bayesian network has a cycle through '" + bn.variables[i].name + "'");
    mark[i] = 1;
    for (auto& p : bn.variables[i].parents) visit(idx.at(p));
    mark[i] = 2;
    out.push_back(i);
  };
  for (size_t i = 0; i < bn.variables.size(); ++i) visit(i);
  return out;
}

}  // namespace

BayesNet parse_bayes_net(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    input_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("variables") || !j["variables"].is_array())
    input_error("Bayesian network JSON needs a \"variables\" array");
  BayesNet bn;
  std::set<std::string> names;
  try {
    for (auto& v : j["variables"]) {
      BnVariable var;
      var.name = v.at("name").get<std::string>();
      var.states = v.at("states").get<std::vector<std::string>>();
      var.parents = v.value("parents", std::vector<std::string>{});
      var.cpt = v.at("cpt").get<std::vector<std::vector<double>>>();
      if (!names.insert(var.name).second) input_error("variable '" + var.name + "' declared twice");
      if (var.states.size() < 2) input_error("variable '" + var.name + "' needs at least two states");
      bn.variables.push_back(std::move(var));
    }
  } catch (const nlohmann::json::exception& e) {
    input_error(std::string("malformed Bayesian network: ") + e.what());
  }
  std::map<std::string, size_t> arity;
  for (auto& v : bn.variables) arity[v.name] = v.states.size();
  for (auto& v : bn.variables) {
    size_t rows = 1;
    for (auto& p : v.parents) {
      if (!arity.count(p)) input_error("'" + v.name + "' has unknown parent '" + p + "'");
      rows *= arity[p];
    }
    if (v.cpt.size() != rows)
      input_error("'" + v.name + "' has " + std::to_string(v.cpt.size()) + " CPT rows, expected " +
                  std::to_string(rows));
    for (auto& row : v.cpt) {
      if (row.size() != v.states.size()) input_error("CPT row of '" + v.name + "' has the wrong width");
      double sum = 0;
      for (double p : row) {
        if (!(p >= 0 && p <= 1)) input_error("CPT entry of '" + v.name + "' is outside [0, 1]");
        sum += p;
      }
      if (std::abs(sum - 1) > 1e-9) input_error("CPT row of '" + v.name + "' sums to " + num(sum));
    }
  }
  topo_order(bn);
  return bn;
}

std::string gen_bn(const BayesNet& bn, UtilityStrategy strategy, uint64_t seed) {
  Rng rng(seed);
  std::vector<size_t> order = topo_order(bn);
  const size_t n = bn.variables.size();
  std::vector<std::string> base(n);
  std::set<std::string> taken;
  for (size_t i = 0; i < n; ++i) {
    std::string b = ident(bn.variables[i].name, "v");
    while (!taken.insert(b).second) b += "_";
    base[i] = b;
  }
  // indicator[i][s]: a Boolean expression that holds when node i is in state s.
  std::vector<std::vector<std::string>> indicator(n);
  std::vector<std::vector<std::string>> state_names(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& v = bn.variables[i];
    std::set<std::string> seen;
    for (size_t s = 0; s < v.states.size(); ++s) {
      std::string st = ident(v.states[s], "s");
      while (!seen.insert(st).second) st += "_";
      state_names[i].push_back(st);
      if (v.states.size() == 2) indicator[i].push_back(s == 0 ? base[i] : "!" + base[i]);
      else indicator[i].push_back(base[i] + "__" + st);
    }
  }

  std::vector<bool> decision(n, false);
  size_t decisions = 0;
  for (size_t i = 0; i < n; ++i)
    if (bn.variables[i].parents.empty()) decision[i] = true, ++decisions;
  while (decisions < 4 && decisions < n) {
    for (size_t i : order) {
      if (decisions >= 4) break;
      if (!decision[i] && rng.chance(0.5)) decision[i] = true, ++decisions;
    }
  }

  std::map<std::string, size_t> idx;
  for (size_t i = 0; i < n; ++i) idx[bn.variables[i].name] = i;
  std::ostringstream os;
  for (size_t i : order) {
    const auto& v = bn.variables[i];
    const size_t k = v.states.size();
    if (decision[i]) {
      os << base[i] << "_d <- [";
      for (size_t s = 0; s < k; ++s) os << (s ? ", " : "") << state_names[i][s];
      os << "];\n";
      size_t outs = k == 2 ? 1 : k;
      for (size_t o = 0; o < outs; ++o) {
        os << (k == 2 ? base[i] : indicator[i][o]) << " <- choose " << base[i] << "_d";
        for (size_t s = 0; s < k; ++s) os << " | " << state_names[i][s] << " -> " << (s == o ? "tt" : "ff");
        os << ";\n";
      }
      continue;
    }
    // Row conditions over the parents, last parent fastest.
    std::vector<std::string> conds;
    size_t rows = v.cpt.size();
    for (size_t r = 0; r < rows; ++r) {
      std::vector<std::string> lits;
      size_t rem = r;
      for (size_t pi = v.parents.size(); pi-- > 0;) {
        size_t p = idx.at(v.parents[pi]);
        size_t ar = bn.variables[p].states.size();
        lits.insert(lits.begin(), indicator[p][rem % ar]);
        rem /= ar;
      }
      conds.push_back(conj(lits));
    }
    // One Boolean per state except the last, each conditioned on the earlier
    // ones being false.
    size_t outs = k == 2 ? 1 : k - 1;
    for (size_t s = 0; s < outs; ++s) {
      auto leaf = [&](size_t r) {
        double rem = 1;
        for (size_t t = 0; t < s; ++t) rem -= v.cpt[r][t];
        double q = rem > 1e-12 ? std::clamp(v.cpt[r][s] / rem, 0.0, 1.0) : 0.0;
        return "flip " + num(q);
      };
      std::string e = leaf(rows - 1);
      for (size_t r = rows - 1; r-- > 0;) e = "if " + conds[r] + " then " + leaf(r) + " else " + e;
      if (s > 0) {
        std::vector<std::string> prev(indicator[i].begin(), indicator[i].begin() + static_cast<long>(s));
        e = "if " + disj(prev) + " then ff else (" + e + ")";
      }
      os << (k == 2 ? base[i] : indicator[i][s]) << " <- " << e << ";\n";
    }
    if (k > 2) {
      std::vector<std::string> prev(indicator[i].begin(), indicator[i].end() - 1);
      os << indicator[i][k - 1] << " <- return !" << disj(prev) << ";\n";
    }
  }

  if (strategy == UtilityStrategy::existing) {
    for (size_t i : order) {
      for (size_t s = 0; s < indicator[i].size(); ++s) {
        if (!rng.chance(s == 0 ? 0.8 : 0.3)) continue;
        os << "if " << indicator[i][s] << " then reward " << rng.range(0, 100) << " else ();\n";
      }
    }
  } else {
    for (int r = 0; r < 5; ++r) {
      std::vector<std::string> terms;
      for (int a = 0; a < 5; ++a) {
        int width = rng.range(1, std::min<int>(3, static_cast<int>(n)));
        std::vector<size_t> pool(n);
        for (size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::string> lits;
        for (int w = 0; w < width; ++w) {
          size_t pick = static_cast<size_t>(rng.range(0, static_cast<int>(pool.size()) - 1));
          size_t node = pool[pick];
          pool.erase(pool.begin() + static_cast<long>(pick));
          lits.push_back(indicator[node][static_cast<size_t>(
              rng.range(0, static_cast<int>(indicator[node].size()) - 1))]);
        }
        terms.push_back(conj(lits));
      }
      os << "rn" << r << " <- return " << disj(terms) << ";\n";
      os << "if rn" << r << " then reward " << rng.range(0, 100) << " else reward " << rng.range(0, 100) << ";\n";
    }
  }
  os << "return tt\n";
  return os.str();
}

std::string gen_dr(int n, uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::usage, "dr needs n >= 1");
  Rng rng(seed);
  std::ostringstream os;
  std::string close;
  for (int i = 0; i < n; ++i) {
    double bias = rng.range(10, 90) / 100.0;
    int m = rng.range(2, 6);
    os << "coin" << i << " <- flip " << num(bias) << ";\n";
    os << "if coin" << i << " then choose [";
    for (int a = 0; a < m; ++a) os << (a ? ", " : "") << "u" << a;
    os << "]";
    for (int a = 0; a < m; ++a) os << "\n  | u" << a << " -> reward " << rng.range(0, 100);
    os << "\nelse (";
    close += ")";
  }
  os << "return tt" << close << "\n";
  return os.str();
}

std::string gen_ladder(int n, int k, uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::usage, "ladder needs n >= 1");
  if (k < 1 || k > 2 * n) throw Error(ErrorKind::usage, "ladder needs 1 <= k <= 2n");
  Rng rng(seed);
  std::ostringstream os;
  const char* rail[2] = {"t", "b"};
  std::vector<int> reward(2 * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < 2; ++r) {
      os << "fail_" << rail[r] << i << " <- flip " << num(rng.range(5, 20) / 100.0) << ";\n";
      reward[static_cast<size_t>(2 * i + r)] = rng.range(0, 100);
    }
  }
  // The packet enters at the top of rung 0; a working router forwards it
  // straight or across at random.
  os << "at_t0 <- return tt;\nat_b0 <- return ff;\n";
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < 2; ++r) os << "cross_" << rail[r] << i << " <- flip 0.5;\n";
    if (i + 1 == n) break;
    os << "at_t" << i + 1 << " <- return (at_t" << i << " && !fail_t" << i << " && !cross_t" << i << ") || (at_b" << i
       << " && !fail_b" << i << " && cross_b" << i << ");\n";
    os << "at_b" << i + 1 << " <- return (at_b" << i << " && !fail_b" << i << " && !cross_b" << i << ") || (at_t" << i
       << " && !fail_t" << i << " && cross_t" << i << ");\n";
  }
  os << "arrived <- return (at_t" << n - 1 << " && !fail_t" << n - 1 << ") || (at_b" << n - 1 << " && !fail_b"
     << n - 1 << ");\n";
  os << "observe !arrived;\n";
  auto attempt = [&] {
    std::ostringstream a;
    a << "choose [";
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < 2; ++r) a << (i || r ? ", " : "") << rail[r] << i;
    a << "]";
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < 2; ++r)
        a << "\n  | " << rail[r] << i << " -> if fail_" << rail[r] << i << " then reward "
          << reward[static_cast<size_t>(2 * i + r)] << " (return tt) else return ff";
    return a.str();
  };
  os << "found1 <- " << attempt() << ";\n";
  for (int t = 2; t <= k; ++t) os << "found" << t << " <- if found" << t - 1 << " then return tt else " << attempt() << ";\n";
  os << "return tt\n";
  return os.str();
}

std::string gen_gridworld(int dim, int horizon, double p, uint64_t seed) {
  if (dim < 2) throw Error(ErrorKind::usage, "gridworld needs dim >= 2");
  if (horizon < 1) throw Error(ErrorKind::usage, "gridworld needs horizon >= 1");
  if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::usage, "gridworld slip probability must be in [0, 1]");
  Rng rng(seed);
  enum Cell { open, trap, obstacle, goal };
  std::vector<Cell> grid(static_cast<size_t>(dim * dim), open);
  auto at = [&](int r, int c) -> Cell& { return grid[static_cast<size_t>(r * dim + c)]; };
  int gr = 0, gc = 0;
  while (gr == 0 && gc == 0) gr = rng.range(0, dim - 1), gc = rng.range(0, dim - 1);
  at(gr, gc) = goal;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      if ((r == 0 && c == 0) || at(r, c) == goal) continue;
      double u = rng.unit();
      if (u < 0.1) at(r, c) = trap;
      else if (u < 0.2) at(r, c) = obstacle;
    }

  const char* dirs[4] = {"U", "D", "L", "R"};
  const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
  auto pos = [](int t, int r, int c) { return "p" + std::to_string(t) + "_" + std::to_string(r) + "_" + std::to_string(c); };
  std::ostringstream os;
  os << "// " << dim << "x" << dim << " grid, goal at (" << gr << "," << gc << ")";
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      if (at(r, c) == trap) os << ", trap (" << r << "," << c << ")";
      if (at(r, c) == obstacle) os << ", obstacle (" << r << "," << c << ")";
    }
  os << "\n";
  std::set<std::pair<int, int>> reach = {{0, 0}};
  os << pos(0, 0, 0) << " <- return tt;\n";
  for (int t = 0; t < horizon; ++t) {
    os << "a" << t << " <- [U, D, L, R];\n";
    os << "ok" << t << " <- flip " << num(1 - p) << ";\n";
    os << "w" << t << "a <- flip " << num(1.0 / 3) << ";\n";
    os << "w" << t << "b <- flip 0.5;\n";
    // mv{t}{d}: the robot actually moves in direction d.
    for (int d = 0; d < 4; ++d) {
      os << "mv" << t << dirs[d] << " <- choose a" << t;
      for (int want = 0; want < 4; ++want) {
        std::string e;
        if (want == d) {
          e = "ok" + std::to_string(t);
        } else {
          int slot = 0;
          for (int o = 0; o < 4; ++o) {
            if (o == want) continue;
            if (o == d) break;
            ++slot;
          }
          std::string w = "w" + std::to_string(t);
          if (slot == 0) e = "!ok" + std::to_string(t) + " && " + w + "a";
          else if (slot == 1) e = "!ok" + std::to_string(t) + " && !" + w + "a && " + w + "b";
          else e = "!ok" + std::to_string(t) + " && !" + w + "a && !" + w + "b";
        }
        os << " | " << dirs[want] << " -> return " << e;
      }
      os << ";\n";
    }
    std::map<std::pair<int, int>, std::vector<std::string>> into;
    for (auto [r, c] : reach) {
      std::string here = pos(t, r, c);
      if (at(r, c) == trap || at(r, c) == goal) {
        into[{r, c}].push_back(here);
        continue;
      }
      for (int d = 0; d < 4; ++d) {
        int nr = r + dr[d], nc = c + dc[d];
        if (nr < 0 || nr >= dim || nc < 0 || nc >= dim || at(nr, nc) == obstacle) nr = r, nc = c;
        into[{nr, nc}].push_back("(" + here + " && mv" + std::to_string(t) + dirs[d] + ")");
      }
    }
    std::set<std::pair<int, int>> next;
    for (auto& [cell, terms] : into) {
      os << pos(t + 1, cell.first, cell.second) << " <- return " << disj(terms) << ";\n";
      next.insert(cell);
    }
    if (next.count({gr, gc})) {
      std::string before = reach.count({gr, gc}) ? " && !" + pos(t, gr, gc) : "";
      os << "if " << pos(t + 1, gr, gc) << before << " then reward 100 else ();\n";
    }
    reach = std::move(next);
  }
  os << "return tt\n";
  return os.str();
}

std::string gen_nested_mmap(int n) {
  if (n < 1) throw Error(ErrorKind::usage, "nested-mmap needs n >= 1");
  std::ostringstream os;
  os << "m = true;\n"
     << "loop " << n << " {\n"
     << "  if m {\n"
     << "    x = flip 0.5; y = flip 0.5;\n"
     << "    if x && y { z = flip 0.5; }\n"
     << "    else { z = flip 0.5; }\n"
     << "  } else {\n"
     << "    x = flip 0.5; y = flip 0.5;\n"
     << "    if !x && !y { z = flip 0.5; }\n"
     << "    else { z = flip 0.5; }\n"
     << "  }\n"
     << "  (m) = mmap(z);\n"
     << "}\n"
     << "pr(z)\n";
  return os.str();
}

}  // namespace meu::gen
