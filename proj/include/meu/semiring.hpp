#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace meu {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double pos_inf = std::numeric_limits<double>::infinity();

// 0 * x is 0 even for infinite x, so a zero-probability pair never poisons a
// product with NaN.
inline double guarded_mul(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

struct ExpectationValue {
  double prob = 0.0;
  double util = 0.0;

  friend bool operator==(const ExpectationValue&, const ExpectationValue&) = default;
};

inline ExpectationValue scalar_div(ExpectationValue a, double r) {
  if (r == 0.0) return {0.0, neg_inf};
  return {a.prob / r, a.util / r};
}

// Probability/utility pairs: (p,u) (x) (q,v) = (pq, pv + qu).
struct ExpectationSemiring {
  using value = ExpectationValue;

  static value zero() { return {0.0, 0.0}; }
  static value one() { return {1.0, 0.0}; }
  static value bottom() { return {0.0, neg_inf}; }

  static value add(value a, value b) { return {a.prob + b.prob, a.util + b.util}; }
  static value mul(value a, value b) {
    return {a.prob * b.prob, guarded_mul(a.prob, b.util) + guarded_mul(b.prob, a.util)};
  }
  static value join(value a, value b) {
    return {std::max(a.prob, b.prob), std::max(a.util, b.util)};
  }
  static value meet(value a, value b) {
    return {std::min(a.prob, b.prob), std::min(a.util, b.util)};
  }
  static bool partial_le(value a, value b) { return a.prob <= b.prob && a.util <= b.util; }
  static bool total_le(value a, value b) {
    if (a.util == neg_inf) return true;
    return a.util < b.util || (a.util == b.util && a.prob <= b.prob);
  }
  static double scalar(value a) { return a.util; }
};

struct RealSemiring {
  using value = double;

  static value zero() { return 0.0; }
  static value one() { return 1.0; }
  static value bottom() { return neg_inf; }

  static value add(value a, value b) { return a + b; }
  static value mul(value a, value b) { return a * b; }
  static value join(value a, value b) { return std::max(a, b); }
  static value meet(value a, value b) { return std::min(a, b); }
  static bool partial_le(value a, value b) { return a <= b; }
  static bool total_le(value a, value b) { return a <= b; }
  static double scalar(value a) { return a; }
};

inline bool near(double a, double b, double tol) {
  if (a == b) return true;
  return std::fabs(a - b) <= tol;
}

inline bool near(ExpectationValue a, ExpectationValue b, double tol) {
  return near(a.prob, b.prob, tol) && near(a.util, b.util, tol);
}

}  // namespace meu
