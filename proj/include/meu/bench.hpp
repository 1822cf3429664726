#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meu/gen.hpp"

namespace meu::bench {

struct BenchSpec {
  std::string family;  // bn | dr | ladder | gridworld | nested-mmap
  int lo = 1, hi = 1;  // size parameter range; for bn it ranges over seeds
  int k = 1;           // ladder attempts
  int horizon = 1;     // gridworld
  double p = 0.1;      // gridworld slip probability
  uint64_t seed = 0;
  int seeds = 1;       // instances per size
  std::string bn_json;
  gen::UtilityStrategy strategy = gen::UtilityStrategy::existing;
  double timeout_ms = 0;
  int threads = 1;
  bool prune = true;
};

struct BenchRow {
  std::string family;
  std::string params;
  uint64_t seed = 0;
  int size = 0;
  double value = 0;
  std::string policy_hash;
  uint64_t nodes = 0;
  uint64_t prunes = 0;
  double time_ms = 0;
  std::string status;  // ok | timeout | error: ...
};

std::vector<BenchRow> run(const BenchSpec& spec);
std::string to_csv(const std::vector<BenchRow>& rows);

struct Fit {
  std::vector<double> coef;  // constant term first
  double r2 = 0;
};
// Least-squares polynomial fit of the given degree.
Fit poly_fit(const std::vector<double>& xs, const std::vector<double>& ys, int degree);

}  // namespace meu::bench
