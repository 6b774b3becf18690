#include <malab/domain.hpp>
#include <malab/geometry.hpp>

#include <catch_amalgamated.hpp>

using namespace malab;
using Catch::Approx;

namespace {
const BoundaryProfile quartic = BoundaryProfile::monomial(4);
}

TEST_CASE("curvature of the quartic and the parabola") {
  CHECK(curvature(quartic, 0.0) == 0.0);
  CHECK(curvature(quartic, 0.5) == Approx(3.0 / std::pow(1.25, 1.5)).epsilon(1e-14));
  const auto parabola = BoundaryProfile::degenerate(2, 2.0, 0.5, PowerSum{}, 1.0);
  CHECK(curvature(parabola, 0.0) == Approx(1.0));
  CHECK_THROWS_AS(curvature(quartic, 1.5), DomainError);
}

TEST_CASE("profiles reject inconsistent metadata") {
  CHECK_THROWS_AS(BoundaryProfile::monomial(3), ParameterError);
  CHECK_THROWS_AS(BoundaryProfile::degenerate(4, 1.0, 1.0, PowerSum::monomial(1.0, 4), 1.0), ParameterError);
  CHECK_THROWS_AS(BoundaryProfile::degenerate(4, 5.0, 1.0, PowerSum{}, 1.0), ParameterError);
  const auto p = BoundaryProfile::degenerate(4, 1.0, 1.0, PowerSum::monomial(2.0, 5), 0.5);
  for (double r : p.degeneracy_residuals()) CHECK(r == 0.0);
  CHECK(p.remainder_constant({0.1, 0.2, -0.3}) == Approx(2.0));
}

TEST_CASE("profile record round trip") {
  const auto p = BoundaryProfile::degenerate(6, 1.5, 2.0, PowerSum::monomial(0.25, 8) + PowerSum::abs_power(3.0, 7.5), 0.7);
  const auto q = BoundaryProfile::from_record(p.to_record());
  CHECK(q.k() == 6);
  CHECK(q.beta() == 1.5);
  CHECK(q.half_width() == 0.7);
  for (double x : {-0.6, -0.1, 0.0, 0.33, 0.7}) CHECK(q(x) == p(x));
}

TEST_CASE("tangent transform") {
  const auto id = tangent_transform(quartic, 0.0);
  CHECK(id.a11 == 1.0);
  CHECK(id.a21 == 0.0);
  CHECK(id.offset.x == 0.0);
  CHECK(id.offset.y == 0.0);
  const auto m = tangent_transform(quartic, 0.5);
  CHECK(m.determinant() == 1.0);
  // y2 = x2 - (1/2)(x1 - 1/2) - 1/16
  for (const Point2 x : {Point2{0.1, 0.7}, Point2{-0.4, 0.2}, Point2{0.5, 0.0625}}) {
    const Point2 y = m(x);
    CHECK(y.x == Approx(x.x - 0.5));
    CHECK(y.y == Approx(x.y - 0.5 * (x.x - 0.5) - 1.0 / 16.0).margin(1e-15));
  }
  Rng rng(7);
  for (int i = 0; i < 100; ++i) CHECK(tangent_transform(quartic, rng.uniform(-0.9, 0.9)).determinant() == 1.0);
  const auto inv = m.inverse();
  const Point2 back = inv(m(Point2{0.3, 0.4}));
  CHECK(back.x == Approx(0.3));
  CHECK(back.y == Approx(0.4));
}

TEST_CASE("transformed quartic profile is 6z^2y^2 + 4zy^3 + y^4") {
  const auto wide = BoundaryProfile::monomial(4, 2.0);
  for (double z : {0.0, 0.5, -0.2, 0.3}) {
    const auto rt = transformed_profile(wide, z);
    CHECK(rt(0.0) == Approx(0.0).margin(1e-15));
    CHECK(rt.derivative(0.0, 1) == Approx(0.0).margin(1e-15));
    for (double y = -0.45; y <= 0.45; y += 0.05) {
      const double expect = 6 * z * z * y * y + 4 * z * y * y * y + y * y * y * y;
      CHECK(rt(y) == Approx(expect).margin(1e-15));
      // sandwich 1/4 (z^2 y^2 + y^4) <= rho~ <= 12 (z^2 y^2 + y^4)
      const double s = z * z * y * y + y * y * y * y;
      CHECK(rt(y) >= 0.25 * s - 1e-16);
      CHECK(rt(y) <= 12.0 * s + 1e-16);
    }
    // height of the original origin above the tangent line
    CHECK(rt(-z) == Approx(-wide(z) + z * wide.derivative(z, 1)).margin(1e-15));
    CHECK(rt.min_second_derivative() >= 0.0);
  }
  CHECK_THROWS_AS(transformed_profile(quartic, 0.5), DomainError);
}

TEST_CASE("comparability ratios") {
  const auto r0 = profile_comparability(quartic, 0.0, 64);
  CHECK(r0.kappa == 0.0);
  CHECK(r0.value.min == Approx(1.0));
  CHECK(r0.value.max == Approx(1.0));
  CHECK(r0.excess.min == Approx(3.0));
  CHECK(r0.excess.max == Approx(3.0));
  CHECK_THROWS_AS(profile_comparability(quartic, 0.0, 8), ParameterError);
  double worst = 0.0;
  for (double z = 0.0; z <= 0.45; z += 0.05) {
    const auto r = profile_comparability(quartic, z, 1000);
    REQUIRE(r.all_positive_finite());
    worst = std::max(worst, r.bound());
  }
  CHECK(std::isfinite(worst));
  CHECK(worst < 100.0);
}

TEST_CASE("angle bound") {
  std::vector<double> heights;
  for (int i = 0; i <= 16; ++i) heights.push_back(std::pow(10.0, -6.0 + 4.0 * i / 16));
  const auto rep = angle_bound_check(quartic, 0.0, heights);
  REQUIRE(!rep.empty());
  CHECK(rep.min_ratio_above >= 1.0 / 144.0);
  CHECK(rep.min_ratio > 0.0);
  for (const auto& s : rep.samples) CHECK(s.p.x != 0.0);
  const auto sextic = BoundaryProfile::monomial(6);
  for (double z : {0.0, 0.1, 0.3}) CHECK(angle_bound_check(sextic, z, heights).min_ratio > 0.0);
}

TEST_CASE("graded points") {
  const auto g = graded_points(1.0, 200, 1.2, 1e-2);
  REQUIRE(g.size() == 200);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  // geometric below the knee: consecutive ratio 1.2
  CHECK(g[2] / g[1] == Approx(1.2));
  const auto u = graded_points(1.0, 5, 1.0);
  CHECK(u[2] == 0.5);
}

TEST_CASE("strip domain") {
  const auto d = Domain2D::strip(quartic, 1.0);
  CHECK(d.contains({0.0, 0.5}));
  CHECK(!d.contains({0.0, -0.01}));
  CHECK(!d.contains({0.0, 1.01}));
  CHECK(!d.contains({0.9, 0.5}));
  const auto s = d.boundary_samples(400);
  CHECK(s.size() >= 390);
  CHECK(s.size() <= 410);
  CHECK(d.boundary_is_convex(s));
  for (const auto& b : s) CHECK(std::abs(d.level(b.p)) < 1e-12);
  // mirror symmetric
  std::vector<double> xs;
  for (const auto& b : s)
    if (b.on_profile) xs.push_back(b.p.x);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(xs[i] == Approx(-xs[xs.size() - 1 - i]).margin(1e-15));
  const auto n = d.inner_normal({0.0, 0.0});
  CHECK(n.x == Approx(0.0).margin(1e-15));
  CHECK(n.y == Approx(1.0));
  const auto t = d.ray_exit({0.0, 0.5}, {0.0, 1.0}, 10.0);
  REQUIRE(t);
  CHECK(*t == Approx(0.5));
}

TEST_CASE("disk domain") {
  const auto d = Domain2D::disk({0.0, 0.0}, 1.0);
  const auto s = d.boundary_samples(64);
  CHECK(s.size() == 64);
  CHECK(d.boundary_is_convex(s));
  CHECK(d.diameter() == Approx(std::sqrt(8.0)));
  const auto t = d.ray_exit({0.5, 0.0}, {1.0, 0.0}, 5.0);
  REQUIRE(t);
  CHECK(*t == Approx(0.5));
}
