#include <malab/boundary_data.hpp>
#include <malab/geometry.hpp>

#include <catch_amalgamated.hpp>

using namespace malab;
using Catch::Approx;

namespace {
const BoundaryProfile quartic = BoundaryProfile::monomial(4);
const BoundaryProfile wide_quartic = BoundaryProfile::monomial(4, 2.0);
}

TEST_CASE("strict floor") {
  CHECK(strict_floor(1.0) == 0);
  CHECK(strict_floor(2.0) == 1);
  CHECK(strict_floor(2.5) == 2);
  CHECK(strict_floor(0.3) == 0);
}

TEST_CASE("datum derivatives agree with finite differences") {
  const BoundaryDatum d(PowerSum::polynomial({0.1, -0.3, 0, 0, 1, 0.5}) + PowerSum::abs_power(0.7, 4.5), 4, 0.5);
  for (double x : {-0.7, -0.2, 0.15, 0.6}) {
    const double e = 1e-5;
    const double fd = (d.function()(x + e) - d.function()(x - e)) / (2 * e);
    CHECK(d.derivative(x, 1) == Approx(fd).epsilon(1e-6));
    const double fd2 = (d.derivative(x + e, 1) - d.derivative(x - e, 1)) / (2 * e);
    CHECK(d.derivative(x, 2) == Approx(fd2).epsilon(1e-6));
  }
}

TEST_CASE("P1 on the quartic trace and on -x1^2") {
  const auto good = BoundaryDatum::polynomial({0, 0, 0, 0, 1}, 4, 4.0);
  CHECK(check_condition(good, Condition::P1).pass);
  const auto bad = BoundaryDatum::polynomial({0, 0, -1}, 4, 4.0);
  const auto r = check_condition(bad, Condition::P1);
  CHECK_FALSE(r.pass);
  REQUIRE(r.first_failure() != nullptr);
  CHECK(r.first_failure()->order == 2);
  CHECK(r.first_failure()->magnitude == 2.0);
}

TEST_CASE("P2 fails at order six for x1^4 + x1^6") {
  const auto d = BoundaryDatum::polynomial({0, 0, 0, 0, 1, 0, 1}, 4, 2.5);
  const auto r = check_condition(d, Condition::P2);
  CHECK_FALSE(r.pass);
  REQUIRE(r.first_failure() != nullptr);
  CHECK(r.first_failure()->order == 6);
  REQUIRE(r.residuals.size() == 2);
  CHECK(r.residuals[0].order == 5);
  CHECK(r.residuals[0].magnitude == 0.0);
  CHECK(r.residuals[1].magnitude == Approx(720.0));
  // beta = 2 only checks order 5
  CHECK(check_condition(BoundaryDatum::polynomial({0, 0, 0, 0, 1, 0, 1}, 4, 2.0), Condition::P2).pass);
}

TEST_CASE("P1' covers odd orders") {
  const auto d = BoundaryDatum::polynomial({0, 0, 0, 1, 1}, 4, 4.0);
  CHECK(check_condition(d, Condition::P1).pass);
  CHECK_FALSE(check_condition(d, Condition::P1Prime).pass);
}

TEST_CASE("insufficient smoothness raises a capability error") {
  const BoundaryDatum d(PowerSum::abs_power(1.0, 4.5), 4, 2.0);
  CHECK_THROWS_AS(check_condition(d, Condition::P2), CapabilityError);
  CHECK(check_condition(d, Condition::P1).pass);
}

TEST_CASE("P3 on a bivariate obstacle") {
  // w = x2 + x1^2: second-order partial in x1 is 2
  BivariatePolynomial w({{0, 1}, {0}, {1}});
  const auto r = check_condition(w, 4, 1.0);
  CHECK_FALSE(r.pass);
  CHECK(r.first_failure()->order == 2);
  CHECK(r.first_failure()->order_x2 == 0);
  BivariatePolynomial flat({{0, 1}, {0, 3}});  // x2 + 3 x1 x2 ... has a mixed second partial
  CHECK_FALSE(check_condition(flat, 4, 1.0).pass);
  BivariatePolynomial affine({{1, 2}, {3}});
  CHECK(check_condition(affine, 4, 2.5).pass);
}

TEST_CASE("subtracting the support at 0") {
  const auto d = BoundaryDatum::polynomial({0.3, -1.2, 0, 0, 2, 0.5}, 4, 1.0);
  const auto s = subtract_affine(d, quartic, d.derivative(0, 0), d.derivative(0, 1), 0.0);
  CHECK(s.derivative(0, 0) == Approx(0.0).margin(1e-15));
  CHECK(s.derivative(0, 1) == Approx(0.0).margin(1e-15));
}

TEST_CASE("subtracting a multiple of the profile from x1^8") {
  const auto d = BoundaryDatum::polynomial({0, 0, 0, 0, 0, 0, 0, 0, 1}, 4, 4.0);
  const auto s = subtract_affine(d, quartic, 0.0, 0.0, 3.0);
  for (int i = 2; i <= 3; ++i) CHECK(s.derivative(0, i) == 0.0);
  CHECK(s.derivative(0, 8) == Approx(40320.0));
}

TEST_CASE("condition reports are invariant under affine subtraction") {
  Rng rng(11);
  const std::vector<BoundaryDatum> data{BoundaryDatum::polynomial({0, 0, 0, 0, 1, 0, 1}, 4, 2.5),
                                        BoundaryDatum::polynomial({0, 0, -1}, 4, 4.0),
                                        BoundaryDatum::polynomial({0, 0, 0, 0, 0, 0, 1, 0, 1}, 6, 3.0)};
  for (const auto& d : data) {
    const auto& prof = d.declared_k() == 4 ? quartic : BoundaryProfile::monomial(6);
    for (int t = 0; t < 20; ++t) {
      const auto s = subtract_affine(d, prof, rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0);
      CHECK(check_condition(s, Condition::P1) == check_condition(d, Condition::P1));
      CHECK(check_condition(s, Condition::P2) == check_condition(d, Condition::P2));
    }
  }
}

TEST_CASE("profile multiples change only orders >= k") {
  // a2 rho has zero derivatives below k, so P1 and P1' residuals are unchanged
  const auto d = BoundaryDatum::polynomial({0, 0, 0, 0, 1}, 4, 4.0);
  const auto s = subtract_affine(d, quartic, 0.0, 0.0, 0.7);
  CHECK(check_condition(s, Condition::P1) == check_condition(d, Condition::P1));
  CHECK(check_condition(s, Condition::P1Prime) == check_condition(d, Condition::P1Prime));
  CHECK(s.derivative(0, 4) == Approx(24.0 * 0.3));
}

TEST_CASE("P1 implies vanishing odd derivatives for convex nonnegative traces") {
  // traces of convex u >= 0 with u(0) = 0, Du(0) = 0: u = x2^p + c x1^{2m}
  for (double p : {1.0, 1.25, 1.5, 2.0}) {
    for (int m : {2, 3}) {
      PowerSum trace = PowerSum::abs_power(1.0, 4.0 * p) + PowerSum::monomial(0.5, 2 * m);
      const BoundaryDatum d(trace, 4, 4.0);
      if (!check_condition(d, Condition::P1).pass) continue;
      CHECK(check_condition(d, Condition::P1Prime).pass);
    }
  }
}

TEST_CASE("pullback matches direct substitution") {
  const auto d = BoundaryDatum::polynomial({0, 0, 0, 0, 1}, 4, 4.0);
  const auto map = tangent_transform(wide_quartic, 0.5);
  const auto rt = transformed_profile(wide_quartic, 0.5);
  const auto e = pullback(d, map, rt);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double y = rng.uniform(rt.window_lo(), rt.window_hi());
    CHECK(e(y) == Approx(std::pow(y + 0.5, 4)).epsilon(1e-12).margin(1e-12));
    CHECK(e(Point2{y, 0.3}) == e(y));
  }
  CHECK_THROWS_AS(e(rt.window_hi() + 0.1), DomainError);
}

TEST_CASE("pullback round trip on the boundary") {
  const auto d = BoundaryDatum::polynomial({0.2, 0.1, 0, 0.3, 1, -0.4}, 4, 1.0);
  for (double z : {0.0, 0.3, -0.6}) {
    const auto map = tangent_transform(wide_quartic, z);
    const auto rt = transformed_profile(wide_quartic, z);
    const auto e = pullback(d, map, rt);
    const auto inv = map.inverse();
    for (double x1 : {-0.9, -0.2, 0.0, 0.4, 0.95}) {
      const Point2 y = map(Point2{x1, wide_quartic(x1)});
      CHECK(y.y == Approx(rt(y.x)).margin(1e-13));
      CHECK(e(y.x) == Approx(d.function()(inv(y).x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("identity pullback and affine traces") {
  const auto d = BoundaryDatum::polynomial({1, 2}, 4, 4.0);
  const auto e = pullback(d, tangent_transform(quartic, 0.0), transformed_profile(quartic, 0.0));
  for (double y : {-0.5, 0.0, 0.7}) CHECK(e(y) == Approx(1 + 2 * y));
  CHECK_THROWS_AS(pullback(d, tangent_transform(quartic, 0.1), transformed_profile(quartic, 0.0)), ParameterError);
}

TEST_CASE("Taylor growth bound") {
  {
    const auto d = BoundaryDatum::polynomial({0, 0, 0, 0, 1}, 4, 4.0);
    const auto e = pullback(d, tangent_transform(quartic, 0.0), transformed_profile(quartic, 0.0));
    const auto r = taylor_growth_bound(d, e, 0.5);
    CHECK(r.c1 == Approx(1.0).epsilon(1e-12));
    CHECK(r.phi_k == Approx(24.0));
  }
  {
    // affine u = b0 + b1 x1 + b2 x2 pulls back to b0' + b1' y1 + b2 rho~, so C1 = b2
    for (double b2 : {0.0, 0.75}) {
      const BoundaryDatum d(PowerSum::polynomial({0.4, -1.1}) + wide_quartic.function().scaled(b2), 4, 4.0);
      const auto e = pullback(d, tangent_transform(wide_quartic, 0.3), transformed_profile(wide_quartic, 0.3));
      CHECK(taylor_growth_bound(d, e, 0.4).c1 == Approx(b2).margin(1e-6));
    }
  }
  {
    const auto d = BoundaryDatum::polynomial({0, 0, 0, 0, 1, 1}, 4, 1.0);
    const auto e = pullback(d, tangent_transform(wide_quartic, 0.2), transformed_profile(wide_quartic, 0.2));
    const auto coarse = taylor_growth_bound(d, e, 0.3, 200);
    const auto fine = taylor_growth_bound(d, e, 0.3, 1600);
    CHECK(std::isfinite(coarse.c1));
    CHECK(fine.c1 == Approx(coarse.c1).epsilon(1e-3));
    // invariant under adding a0 + a1 x1
    const auto s = subtract_affine(d, wide_quartic, -0.6, 2.5, 0.0);
    const auto es = pullback(s, tangent_transform(wide_quartic, 0.2), transformed_profile(wide_quartic, 0.2));
    CHECK(taylor_growth_bound(s, es, 0.3, 1600).c1 == Approx(fine.c1).epsilon(1e-9));
  }
  {
    const auto bad = BoundaryDatum::polynomial({0, 0, -1}, 4, 4.0);
    const auto e = pullback(bad, tangent_transform(quartic, 0.0), transformed_profile(quartic, 0.0));
    try {
      taylor_growth_bound(bad, e, 0.5);
      FAIL("expected a condition error");
    } catch (const ConditionError& err) {
      CHECK(err.report().which == Condition::P1);
      CHECK_FALSE(err.report().pass);
    }
  }
}

TEST_CASE("datum record") {
  const auto d = BoundaryDatum::polynomial({0, 1, 0, 0, 2}, 4, 1.5);
  const std::string rec = d.to_record();
  CHECK(rec.find("k=4") != std::string::npos);
}
