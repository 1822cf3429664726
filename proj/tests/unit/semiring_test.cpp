#include <cmath>

#include "doctest.h"
#include "meu/semiring.hpp"
#include "support/random.hpp"

using namespace meu;
using SE = ExpectationSemiring;

namespace {
bool eq(ExpectationValue a, ExpectationValue b) { return near(a, b, 1e-12); }
}  // namespace

TEST_SUITE("semiring") {
  TEST_CASE("addition") {
    CHECK(eq(SE::add({0.1, 1}, {0.9, -4.5}), {1, -3.5}));
    CHECK(eq(SE::add({0.4, 7}, SE::zero()), {0.4, 7}));
    CHECK(eq(SE::add({0.35, 2}, {0.15, -7}), {0.5, -5}));
  }

  TEST_CASE("multiplication") {
    CHECK(eq(SE::mul({0.1, 0}, {1, 10}), {0.1, 1}));
    CHECK(eq(SE::mul({0.4, 7}, SE::one()), {0.4, 7}));
    CHECK(eq(SE::mul({0.5, 2}, {0.5, 2}), {0.25, 2}));
  }

  TEST_CASE("zero probability absorbs an infinite utility") {
    auto r = SE::mul({0, 0}, {0, neg_inf});
    CHECK(r.prob == 0);
    CHECK(r.util == 0);
  }

  TEST_CASE("join and meet") {
    CHECK(eq(SE::join({1, 10}, {1, -100}), {1, 10}));
    CHECK(eq(SE::join({0.3, -2}, {0.3, -2}), {0.3, -2}));
    CHECK(eq(SE::meet({0.5, 1}, {1, 0}), {0.5, 0}));
  }

  TEST_CASE("total order") {
    CHECK(SE::total_le({1, -10}, {1, -3.5}));
    CHECK(SE::total_le({0.3, 5}, {0.3, 5}));
    CHECK_FALSE(SE::total_le({0.9, 5}, {0.1, 5}));
    CHECK(SE::total_le(SE::bottom(), {0, -1e300}));
  }

  TEST_CASE("scalar division") {
    CHECK(eq(scalar_div({0.35, 3.5}, 0.35), {1, 10}));
    CHECK(eq(scalar_div({0.4, 7}, 1), {0.4, 7}));
    auto d = scalar_div({0.2, 4}, 0);
    CHECK(d.prob == 0);
    CHECK(d.util == neg_inf);
  }

  TEST_CASE("partial order implies total order") {
    testing::Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
      auto a = testing::random_ev(rng), b = testing::random_ev(rng);
      if (SE::partial_le(a, b)) CHECK(SE::total_le(a, b));
    }
  }

  TEST_CASE("reals") {
    CHECK(RealSemiring::add(0.25, 0.5) == 0.75);
    CHECK(RealSemiring::join(0.25, 0.5) == 0.5);
    CHECK(RealSemiring::meet(0.25, 0.5) == 0.25);
    CHECK(RealSemiring::bottom() == neg_inf);
  }
}
