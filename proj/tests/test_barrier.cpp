#include <malab/barrier.hpp>
#include <malab/geometry.hpp>

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace malab;
using Catch::Approx;

namespace {
const BoundaryProfile quartic = BoundaryProfile::monomial(4);
const BarrierSpec base = default_parameters(4, 1.0, 0.0, 9.0 / 8.0);
}

TEST_CASE("quartic parameters at q = 9/8") {
  CHECK(base.Q == 9.0);
  CHECK(base.h == 1.0 / 256.0);
  CHECK(base.M == 5.0);
  CHECK(base.a() == 5.0 / 8.0);
  CHECK_FALSE(base.det_condition_vacuous);
  CHECK_FALSE(base.height_capped);
}

TEST_CASE("q must lie in the open interval") {
  CHECK_THROWS_AS(default_parameters(4, 1.0, 0.0, 1.25), ParameterError);
  CHECK_THROWS_AS(default_parameters(4, 1.0, 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(default_parameters(6, 1.0, 0.0, 1.0 + 1.0 / 6.0), ParameterError);
  CHECK_THROWS_AS(default_parameters(5, 1.0), ParameterError);
  CHECK_THROWS_AS(default_parameters(4, -1.0), ParameterError);
  CHECK(default_parameters(4, 1.0).q == 1.125);
}

TEST_CASE("general k parameters") {
  const auto s = default_parameters(6, 1.0);
  const double q = 1.0 + 1.0 / 12.0;
  CHECK(s.q == Approx(q));
  const double Q = (6.0 / (q - 1.0)) * (q + 1.0 - 4.0 / 6.0);
  CHECK(s.Q == Approx(Q));
  const double h = std::min(1.0, std::pow(6.0 / 8.0, 1.0 / (2.0 * q - 2.0 / 6.0 - 2.0)));
  CHECK(s.h == Approx(h));
  CHECK(s.M == Approx((6.0 + Q) * std::pow(h, q - 1.0)));
  CHECK(s.a() == Approx(q - 1.0 / 3.0));
}

TEST_CASE("zero f0 makes the determinant condition vacuous") {
  const auto s = default_parameters(4, 0.0);
  CHECK(s.det_condition_vacuous);
  CHECK(s.height_capped);
  CHECK(s.h == 1.0);
  const auto c = default_parameters(4, 0.0, 0.0, {}, 0.25);
  CHECK(c.h == 0.25);
  CHECK(certify(c, quartic, 40).pass());
}

TEST_CASE("barrier value and derivatives") {
  const double h = base.h;
  CHECK(evaluate(base, {0.0, h}).value == Approx(9.0 * std::pow(h, 9.0 / 8.0) - 5.0 * h));
  CHECK(evaluate(base, {0.0, h}).value < 0.0);
  // slope of w(0, .) tends to -M
  CHECK(evaluate(base, {0.0, 1e-40}).gradient.y == Approx(-base.M).epsilon(1e-3));
  CHECK_THROWS_AS(evaluate(base, {0.1, 0.0}), DomainError);
  CHECK_THROWS_AS(hessian_det(base, {0.1, -1.0}), DomainError);
}

TEST_CASE("closed-form determinant") {
  CHECK(hessian_det(base, {0.0, 1.0 / 256.0}) == Approx(81.0 / 16.0).epsilon(1e-14));
  Rng rng(5);
  for (int k : {4, 6, 8}) {
    const auto s = default_parameters(k, 1.0);
    for (int i = 0; i < 100; ++i) {
      const Point2 y{rng.uniform(-0.5, 0.5), s.h * rng.uniform(1e-4, 1.0)};
      const auto H = evaluate(s, y).hessian;
      const double d = hessian_det(s, y);
      CHECK(H.det() == Approx(d).epsilon(1e-12).margin(1e-12 * std::abs(H.xx * H.yy)));
    }
  }
}

TEST_CASE("Hessian matches finite differences") {
  Rng rng(9);
  for (int k : {4, 6}) {
    const auto s = default_parameters(k, 1.0);
    for (int i = 0; i < 200; ++i) {
      const Point2 y{rng.uniform(-0.3, 0.3), s.h * rng.uniform(0.01, 1.0)};
      const double e = 1e-5 * y.y;
      const auto H = evaluate(s, y).hessian;
      const Vec2 gx = (evaluate(s, {y.x + e, y.y}).gradient - evaluate(s, {y.x - e, y.y}).gradient) * (0.5 / e);
      const Vec2 gy = (evaluate(s, {y.x, y.y + e}).gradient - evaluate(s, {y.x, y.y - e}).gradient) * (0.5 / e);
      const double scale = std::abs(H.xx) + std::abs(H.xy) + std::abs(H.yy);
      CHECK(std::abs(gx.x - H.xx) <= 1e-6 * scale);
      CHECK(std::abs(gx.y - H.xy) <= 1e-6 * scale);
      CHECK(std::abs(gy.x - H.xy) <= 1e-6 * scale);
      CHECK(std::abs(gy.y - H.yy) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("determinant positive on the axis") {
  for (int k : {4, 6, 8})
    for (double f0 : {0.25, 1.0, 4.0}) {
      const auto s = default_parameters(k, f0);
      for (int i = 1; i <= 50; ++i) CHECK(hessian_det(s, {0.0, s.h * i / 50.0}) > 0.0);
    }
}

TEST_CASE("certification of the default quartic barrier") {
  const auto rep = certify(base, quartic, 200);
  CHECK(rep.pass());
  CHECK(rep.interior_samples == 200u * 200u);
  CHECK(rep.min_det_margin >= 0.0);
  CHECK(rep.max_boundary_value <= 0.0);
}

TEST_CASE("halving M breaks the boundary inequality") {
  BarrierSpec s = base;
  s.M *= 0.5;
  const auto rep = certify(s, quartic, 200);
  CHECK_FALSE(rep.boundary_pass);
  CHECK(rep.det_pass);
  CHECK(rep.worst_boundary.y == Approx(base.h));
  // already positive on the axis: w(0, h) = h^q (Q - 1) / 2
  CHECK(evaluate(s, {0.0, s.h}).value == Approx(std::pow(s.h, s.q) * (s.Q - 1.0) / 2.0));
  CHECK(rep.max_boundary_value >= evaluate(s, {0.0, s.h}).value);
}

TEST_CASE("a layer well above the height threshold breaks the determinant inequality") {
  BarrierSpec s = base;
  s.h = 0.5;
  s.M = (1.0 + s.Q) * std::pow(s.h, s.q - 1.0);
  const auto rep = certify(s, quartic, 200);
  CHECK_FALSE(rep.det_pass);
  CHECK(rep.boundary_pass);
}

TEST_CASE("certification is monotone in M") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Point2 y{rng.uniform(-0.2, 0.2), base.h * rng.uniform(1e-3, 1.0)};
    BarrierSpec big = base;
    big.M += rng.uniform(0.0, 3.0);
    CHECK(evaluate(big, y).value <= evaluate(base, y).value);
  }
}

TEST_CASE("default barriers certify across k, f0 and base points") {
  for (int k : {4, 6, 8}) {
    const auto profile = BoundaryProfile::monomial(k);
    for (double f0 : {0.25, 1.0, 4.0})
      for (double z : {0.0, 0.1, 0.2, 0.3, 0.45}) {
        const auto rt = transformed_profile(profile, z);
        const auto s = default_parameters(k, f0, 0.0, {}, admissible_height(rt));
        const auto rep = certify(s, rt, 60);
        INFO("k=" << k << " f0=" << f0 << " z=" << z);
        CHECK(rep.pass());
      }
  }
}

TEST_CASE("layers taller than the window are refused") {
  const auto rt = transformed_profile(quartic, 0.3);
  BarrierSpec s = default_parameters(4, 0.0);
  s.h = admissible_height(rt) * 2.0;
  CHECK_THROWS_AS(certify(s, rt, 20), DomainError);
}

TEST_CASE("report merge and CSV") {
  auto a = certify(base, quartic, 20, true);
  const auto b = certify(base, transformed_profile(quartic, 0.2), 20, true);
  const double m = std::min(a.min_det_margin, b.min_det_margin);
  a.merge(b);
  CHECK(a.min_det_margin == m);
  CHECK(a.rows.size() == 800u);
  std::ostringstream os;
  write_certification_csv(os, base, a);
  const std::string s = os.str();
  CHECK(s.rfind("y1,y2,det_minus_f0\n", 0) == 0);
  CHECK(s.find("pass=1") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 802);
}

TEST_CASE("gradient bound") {
  CHECK(barrier_gradient_bound(base, 2.0, 1.0) == Approx(5.0 + 2.0 + 256.0));
}
