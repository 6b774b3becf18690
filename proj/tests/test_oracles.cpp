#include <malab/boundary_data.hpp>
#include <malab/oracles.hpp>
#include <malab/solver.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace malab;
using Catch::Approx;

namespace {
std::vector<Point2> samples_in(const Domain2D& d, int n) {
  Rng rng(11);
  std::vector<Point2> out;
  const Point2 lo = d.bbox_lo(), hi = d.bbox_hi();
  while (static_cast<int>(out.size()) < n) {
    const Point2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    if (d.interior(p) && p.y > 1e-8) out.push_back(p);
  }
  return out;
}
}  // namespace

TEST_CASE("low order polynomials") {
  CHECK(pk(2, 5.0) == 1.0);
  CHECK(qk(2, -3.0) == 1.0);
  CHECK(pk(4, 3.0) == 67.0);
  CHECK(qk(4, 0.0) == 3.0);
  const auto q4 = qk_coefficients(4);
  CHECK(q4 == std::vector<mpz_class>{3, 8, 6});
  CHECK(pk_coefficients(6).size() == 5);
  CHECK_THROWS_AS(pk(3, 1.0), ParameterError);
  CHECK_THROWS_AS(qk_coefficients(0), ParameterError);
}

TEST_CASE("reflection identity holds exactly") {
  for (int k : {2, 4, 6, 8, 10}) {
    const auto r = reflection_check(k, 200, 3);
    CHECK(r.trials == 200);
    CHECK(r.mismatches == 0);
  }
}

TEST_CASE("quartic sandwich constants") {
  const auto s = sandwich_constants(4);
  const auto [lo, hi] = quartic_ratio_extrema();
  CHECK(s.lower == Approx(lo).epsilon(1e-10));
  CHECK(s.upper == Approx(hi).epsilon(1e-10));
  CHECK(s.lower == Approx(0.298438).margin(1e-6));
  CHECK(s.argmin == Approx((5.0 - std::sqrt(41.0)) / 4.0).margin(1e-5));
  CHECK(s.asymptotic == Approx(s.expected_asymptotic).epsilon(1e-2));
  CHECK(s.expected_asymptotic == 6.0);
}

TEST_CASE("k = 2 ratio is constant one half") {
  const auto s = sandwich_constants(2);
  CHECK(s.lower == Approx(0.5));
  CHECK(s.upper == Approx(0.5));
  CHECK(expected_asymptotic(2) == 0.5);
}

TEST_CASE("constants are positive and approach the leading coefficient") {
  for (int k : {6, 8, 10}) {
    const auto s = sandwich_constants(k);
    CHECK(s.lower > 0.0);
    CHECK(s.upper >= s.lower);
    CHECK(s.asymptotic == Approx(s.expected_asymptotic).epsilon(1e-2));
    const auto q = q_sandwich_constants(k);
    CHECK(q.lower > 0.0);
  }
}

TEST_CASE("reflected Q extrema match the P constants") {
  for (int k : {4, 6}) {
    const auto p = sandwich_constants(k);
    const auto q = q_reflected_constants(k);
    CHECK(q.lower == Approx(p.lower).epsilon(1e-8));
    CHECK(q.upper == Approx(p.upper).epsilon(1e-8));
  }
}

TEST_CASE("case library shape") {
  const auto lib = case_library();
  REQUIRE(lib.size() == 4);
  CHECK(find_case("power-strip").exponent == 0.5);
  CHECK(find_case("log-barrier").parameters_are_defaults);
  CHECK(std::isnan(find_case("lipschitz-failure").exponent));
  CHECK_THROWS_AS(find_case("nope"), ParameterError);
  CaseParameters bad;
  bad.sigma = 0.4;
  CHECK_THROWS_AS(case_library(bad), ParameterError);
  CaseParameters a;
  a.alpha = 0.25;
  CHECK(find_case("power-strip", a).exponent == 0.25);
}

TEST_CASE("closed forms satisfy their Monge-Ampere bounds") {
  for (const auto& c : case_library()) {
    for (const auto& p : samples_in(c.domain, 200)) {
      const double det = c.hessian(p).det();
      CHECK(det >= c.det_lower_bound(p) * (1.0 - 1e-12) - 1e-14);
      if (c.id != "log-barrier") CHECK(det == Approx(0.0).margin(1e-12));
      // gradient against central differences
      const double e = 1e-6 * std::max(p.y, 1e-3);
      const double gy = (c.u({p.x, p.y + e}) - c.u({p.x, p.y - e})) / (2 * e);
      CHECK(c.gradient(p).y == Approx(gy).epsilon(1e-5).margin(1e-6));
    }
  }
}

TEST_CASE("boundary traces match the declared data") {
  for (const auto& c : case_library()) {
    if (!c.datum) continue;
    for (double x1 : {-0.9, -0.3, 0.2, 0.7}) {
      const Point2 b{x1, std::pow(x1, 4)};
      CHECK((*c.datum)(x1) == Approx(c.u(b)).epsilon(1e-12));
    }
    CHECK(check_condition(*c.datum, Condition::P1).pass == c.p1);
    CHECK(check_condition(*c.datum, Condition::P2).pass == c.p2);
  }
}

TEST_CASE("log-barrier solution lies above the barrier") {
  // the det bound is smallest at log x2 = -2/(1-sigma), about 2.96e-3; a
  // constant f below it makes w a subsolution, so u >= w
  const auto c = find_case("log-barrier");
  for (const auto& p : samples_in(c.domain, 200)) CHECK(c.det_lower_bound(p) >= 0.002);
  FieldSpec f;
  f.f = [](const Point2&) { return 0.002; };
  f.f0 = 0.002;
  SolverOptions opt;
  opt.resolution = 32;
  const auto u = solve(c.domain, f, c.u, opt);
  double worst = 0.0;
  for (int k : u.interior_nodes()) worst = std::max(worst, c.u(u.node(k)) - u.node_value(k));
  CHECK(worst <= 1e-3);
  CHECK(u({0.0, 0.25}) >= 0.25 / std::abs(std::log(0.25)) - 1e-3);
}
