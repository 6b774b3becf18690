#include <malab/core.hpp>
#include <malab/power_sum.hpp>

#include <catch_amalgamated.hpp>

using namespace malab;
using Catch::Approx;

TEST_CASE("rng is deterministic and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    REQUIRE(x == b.uniform());
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  Rng c(43);
  REQUIRE(Rng(42).next() != c.next());
}

TEST_CASE("binomial and factorial") {
  REQUIRE(binomial(6, 2) == 15.0);
  REQUIRE(binomial(10, 0) == 1.0);
  REQUIRE(binomial(3, 5) == 0.0);
  REQUIRE(factorial(8) == 40320.0);
}

TEST_CASE("power sum shift and expansion") {
  const auto p = PowerSum::polynomial({0, 0, 0, 0, 1});  // x^4
  const auto q = p.shifted(0.5) - PowerSum::polynomial({p(0.5), p.derivative(0.5, 1)});
  const auto c = q.expand();
  REQUIRE(c.size() == 5);
  CHECK(c[0] == Approx(0.0).margin(1e-15));
  CHECK(c[1] == Approx(0.0).margin(1e-15));
  CHECK(c[2] == Approx(1.5));
  CHECK(c[3] == Approx(2.0));
  CHECK(c[4] == Approx(1.0));
}

TEST_CASE("finite smoothness terms refuse high derivatives at the kink") {
  const auto f = PowerSum::abs_power(1.0, 4.5);
  CHECK(f.derivative(0.0, 4) == 0.0);
  CHECK_THROWS_AS(f.derivative(0.0, 5), CapabilityError);
  CHECK(f.smoothness_at(0.0, 10) == 4);
  // away from 0 it matches finite differences
  const double x = 0.3, d = 1e-5;
  CHECK(f.derivative(x, 1) == Approx((f(x + d) - f(x - d)) / (2 * d)).epsilon(1e-8));
  CHECK(f.derivative(-x, 1) == Approx(-f.derivative(x, 1)));
}
