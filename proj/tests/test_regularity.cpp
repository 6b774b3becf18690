#include <malab/envelope.hpp>
#include <malab/regularity.hpp>
#include <malab/solver.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace malab;
using Catch::Approx;

namespace {
const Domain2D quartic_strip = Domain2D::strip(BoundaryProfile::monomial(4), 1.0);
const Domain2D unit_disk = Domain2D::disk({0.0, 0.0}, 1.0);

double pos(double t) { return std::max(t, 0.0); }

FieldView power_strip(double a) {
  return view([a](const Point2& x) { return std::pow(pos(x.y), 1.0 + a); },
              [a](const Point2& x) { return Vec2{0.0, (1.0 + a) * std::pow(pos(x.y), a)}; }, quartic_strip);
}
}  // namespace

TEST_CASE("least squares recovers a line") {
  const auto f = least_squares({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.r2 == Approx(1.0));
  const auto r = default_radii(1.0);
  CHECK(r.front() == Approx(0.1));
  CHECK(r.back() <= 1e-4 * (1.0 + 1e-12));
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] < r[i - 1]);
}

TEST_CASE("value fits of x2^(1+a) at the flat point") {
  for (double a : {0.25, 0.5, 0.75, 1.0}) {
    const auto fit = holder_fit(power_strip(a), {0.0, 0.0}, FitMode::Value);
    CHECK(fit.alpha == Approx(a).margin(0.02));
    CHECK(fit.r2 >= 0.98);
    CHECK_FALSE(fit.inconclusive);
    CHECK_FALSE(fit.sentinel);
    CHECK_FALSE(fit.lipschitz_failure);
    CHECK(fit.constant == Approx(1.0).margin(0.1));
  }
}

TEST_CASE("gradient fits of x2^(1+a)") {
  for (double a : {0.25, 0.5, 0.75}) {
    const auto fit = holder_fit(power_strip(a), {0.0, 0.0}, FitMode::Gradient);
    CHECK(fit.alpha == Approx(a).margin(0.02));
    CHECK_FALSE(fit.inconclusive);
  }
}

TEST_CASE("normal exponent of x2 + x2^(3/2)") {
  const auto u = view([](const Point2& x) { return x.y + std::pow(pos(x.y), 1.5); },
                      [](const Point2& x) { return Vec2{0.0, 1.0 + 1.5 * std::sqrt(pos(x.y))}; }, quartic_strip);
  const auto fit = holder_fit(u, {0.0, 0.0}, FitMode::Value, Vec2{0.0, 1.0});
  CHECK(fit.alpha == Approx(0.5).margin(1e-3));
  CHECK(fit.constant == Approx(1.0).margin(1e-2));
}

TEST_CASE("affine function gives the infinite-exponent sentinel") {
  const auto u = view([](const Point2& x) { return 1.0 + x.x - 2.0 * x.y; },
                      [](const Point2&) { return Vec2{1.0, -2.0}; }, unit_disk);
  const auto fit = holder_fit(u, {0.1, 0.2}, FitMode::Value);
  CHECK(fit.sentinel);
  CHECK(std::isinf(fit.alpha));
}

TEST_CASE("holder_fit argument checks") {
  CHECK_THROWS_AS(holder_fit(power_strip(0.5), {0.0, 0.0}, {0.1, 0.05, 0.01}, FitMode::Value), ParameterError);
  CHECK_THROWS_AS(holder_fit(power_strip(0.5), {0.0, 0.0}, {0.1, 0.08, 0.06, 0.04}, FitMode::Value), ParameterError);
}

TEST_CASE("C^{1,alpha} seminorm of x2^(3/2)") {
  const auto u = power_strip(0.5);
  CHECK(c1alpha_seminorm(u, {0.0, 0.0}, 0.5) == Approx(1.0).margin(1e-3));
  double prev = 0.0;
  for (double al : {0.3, 0.4, 0.5, 0.6, 0.7}) {
    const double c = c1alpha_seminorm(u, {0.0, 0.0}, al);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("Lipschitz failure of -sqrt(x2) is detected along the normal") {
  const auto u = view([](const Point2& x) { return -std::sqrt(pos(x.y)); },
                      [](const Point2& x) { return Vec2{0.0, -0.5 / std::sqrt(std::max(x.y, 1e-300))}; }, quartic_strip);
  const auto lim = support_at(u, {0.0, 0.0});
  CHECK(lim.diverging);
  CHECK(lim.growth_slope == Approx(-0.5).margin(0.02));
  CHECK(std::isinf(c1alpha_seminorm(u, {0.0, 0.0}, 0.5)));
  const auto tr = tangential_holder_check(u, {0.0, 0.0}, 0.5);
  CHECK(tr.lipschitz_failure);
  CHECK_FALSE(tr.consistent());
  CHECK(holder_fit(u, {0.0, 0.0}, FitMode::Value).lipschitz_failure);
}

TEST_CASE("support plane at a smooth boundary point converges") {
  const auto u = view([](const Point2& x) { return 0.5 * dot(x, x); }, [](const Point2& x) { return Vec2{x.x, x.y}; },
                      unit_disk);
  const auto lim = support_at(u, {1.0, 0.0});
  CHECK_FALSE(lim.diverging);
  CHECK(lim.plane.gradient.x == Approx(1.0).margin(1e-6));
  CHECK(lim.plane.gradient.y == Approx(0.0).margin(1e-9));
}

TEST_CASE("tangential derivative checks") {
  const auto flat = tangential_holder_check(power_strip(0.5), {0.0, 0.0}, 0.5);
  CHECK(flat.sentinel);
  CHECK(flat.consistent());
  CHECK(flat.target_exponent == Approx(1.0 / 3.0));
  const auto u = view([](const Point2& x) { return x.x * x.x + std::pow(pos(x.y), 1.5); },
                      [](const Point2& x) { return Vec2{2.0 * x.x, 1.5 * std::sqrt(pos(x.y))}; }, quartic_strip);
  const auto rep = tangential_holder_check(u, {0.0, 0.0}, 0.5);
  CHECK_FALSE(rep.sentinel);
  CHECK(rep.fitted_exponent == Approx(1.0).margin(0.02));
  CHECK(rep.consistent());
  CHECK(rep.constant > 0.0);
}

TEST_CASE("sections of |x|^2 are balanced with decay 1/4") {
  const auto u = view([](const Point2& x) { return dot(x, x); }, [](const Point2& x) { return 2.0 * x; }, unit_disk);
  const auto rep = sublevel_analysis(u, {0.0, 0.0});
  CHECK(rep.h0 == Approx(1.0).margin(1e-9));
  REQUIRE(rep.sections.size() == 6);
  for (const auto& s : rep.sections) {
    CHECK(s.balance_min == Approx(1.0).margin(1e-9));
    CHECK(s.decay_max == Approx(0.25).margin(1e-9));
    CHECK(s.convex);
  }
  CHECK(rep.sigma == Approx(0.25).margin(1e-9));
  CHECK(rep.valid());
}

TEST_CASE("a contact segment through the base point gives h0 = 0") {
  const auto u = view([](const Point2& x) { return x.y * x.y; }, [](const Point2& x) { return Vec2{0.0, 2.0 * x.y}; },
                      unit_disk);
  const auto rep = sublevel_analysis(u, {0.0, 0.0});
  CHECK(rep.h0 == 0.0);
  CHECK(rep.sections.empty());
  CHECK_FALSE(rep.valid());
  CHECK_THROWS_AS(sublevel_analysis(u, {2.0, 0.0}), DomainError);
}

TEST_CASE("sections of the discrete disk solution") {
  FieldSpec f;
  f.f = [](const Point2&) { return 1.0; };
  SolverOptions opt;
  opt.resolution = 32;
  const auto u = solve(unit_disk, f, [](const Point2&) { return 0.0; }, opt);
  const auto rep = sublevel_analysis(view(u, unit_disk), {0.0, 0.0});
  CHECK(rep.valid());
  CHECK(rep.sigma == Approx(0.25).margin(0.02));
}

TEST_CASE("fit CSV export") {
  std::vector<ExponentFit> fits{holder_fit(power_strip(0.5), {0.0, 0.0}, FitMode::Value)};
  std::ostringstream os;
  write_fit_csv(os, fits);
  const std::string s = os.str();
  CHECK(s.rfind("x1,x2,mode,alpha,C,R2,rmin,rmax\n", 0) == 0);
  CHECK(s.find(",value,") != std::string::npos);
  CHECK(std::string(mode_name(FitMode::Gradient)) == "gradient");
}
