#pragma once

// Benchmark-family program generators. Every generator is a pure function of
// its arguments: the same inputs give byte-identical source text.

#include <cstdint>
#include <string>
#include <vector>

namespace meu::gen {

struct BnVariable {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> parents;
  // One row per joint parent state (last parent varies fastest); each row is
  // a distribution over `states`.
  std::vector<std::vector<double>> cpt;
};

struct BayesNet {
  std::vector<BnVariable> variables;
};

// {"variables": [{"name", "states", "parents", "cpt"}]}; checks CPT shapes,
// row sums and acyclicity.
BayesNet parse_bayes_net(const std::string& json_text);

enum class UtilityStrategy { existing, new_nodes };

std::string gen_bn(const BayesNet& bn, UtilityStrategy strategy, uint64_t seed);
std::string gen_dr(int n, uint64_t seed);
std::string gen_ladder(int n, int k, uint64_t seed);
std::string gen_gridworld(int dim, int horizon, double p, uint64_t seed);
std::string gen_nested_mmap(int n);

// Deterministic generator shared by the program generators and the tests.
class Rng {
 public:
  explicit Rng(uint64_t seed) : s_(seed * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull) {}
  uint64_t next() {
    uint64_t z = (s_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // Uniform in [lo, hi].
  int range(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1)); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  uint64_t s_;
};

}  // namespace meu::gen
