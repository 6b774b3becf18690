#pragma once

// Closed-form example solutions on the quartic strip and the two polynomial
// inequalities behind the boundary-layer estimates:
//   P_k(t) = (t+1)^k - t^k - k t^{k-1},  Q_k(t) = t^k + k (t+1)^{k-1} - (t+1)^k.

#include <malab/boundary_data.hpp>
#include <malab/core.hpp>
#include <malab/domain.hpp>
#include <malab/geometry.hpp>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace malab {

enum class Regularity { C1Alpha, NotC1Alpha, NotLipschitz, BelowC1BetaK };

inline const char* regularity_name(Regularity r) {
  switch (r) {
    case Regularity::C1Alpha: return "C1alpha";
    case Regularity::NotC1Alpha: return "not-C1alpha";
    case Regularity::NotLipschitz: return "not-Lipschitz";
    case Regularity::BelowC1BetaK: return "below-C1beta/k";
  }
  return "?";
}

struct ClosedFormCase {
  std::string id;
  std::string description;
  Domain2D domain;
  std::function<double(const Point2&)> u;
  std::function<Vec2(const Point2&)> gradient;
  std::function<Sym2(const Point2&)> hessian;
  // Monge-Ampere lower bound the exact u satisfies (0 for homogeneous cases)
  std::function<double(const Point2&)> det_lower_bound;
  std::optional<BoundaryDatum> datum;  // trace as a function of x1 when it is a power sum
  Regularity expected = Regularity::C1Alpha;
  double exponent = 0.0;  // expected value-mode exponent at the flat point (NaN when none)
  double beta = 0.0;      // order used for the C^{1,beta/k} comparison
  bool p1 = true;
  bool p2 = true;
  bool parameters_are_defaults = false;  // constants chosen by the laboratory, not fixed by the example
};

struct CaseParameters {
  double alpha = 0.5;    // power-strip exponent
  double delta = 1e-2;   // log-barrier coefficient of x1^2 x2^sigma
  double sigma = 0.6;    // log-barrier exponent
  double log_cap = 0.5;  // log-barrier domain height; the log term is singular at x2 = 1
  double p2_beta = 2.5;  // beta = 2 + eps in the P2 failure case
};

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

inline std::vector<ClosedFormCase> case_library(const CaseParameters& prm = {}) {
  if (!(prm.alpha > 0.0 && prm.alpha < 1.0)) throw ParameterError("case_library: alpha must lie in (0,1)");
  if (!(prm.sigma > 0.5 && prm.sigma < 1.0) || !(prm.delta > 0.0))
    throw ParameterError("case_library: need delta > 0 and sigma in (1/2,1)");
  if (!(prm.log_cap > 0.0 && prm.log_cap < 1.0)) throw ParameterError("case_library: log_cap must lie in (0,1)");
  if (!(prm.p2_beta > 2.0 && prm.p2_beta <= 4.0)) throw ParameterError("case_library: p2_beta must lie in (2,4]");
  const auto quartic = BoundaryProfile::monomial(4);
  const double nan = std::nan("");
  std::vector<ClosedFormCase> out;
  auto zero = [](const Point2&) { return 0.0; };

  {
    const double p = 1.0 + prm.alpha;
    ClosedFormCase c{"power-strip",
                     "u = x2^(1+alpha) on the x1^4 strip; homogeneous, C^{1,alpha} at the flat point",
                     Domain2D::strip(quartic, 1.0),
                     [p](const Point2& x) { return std::pow(positive_part(x.y), p); },
                     [p](const Point2& x) { return Vec2{0.0, p * std::pow(positive_part(x.y), p - 1.0)}; },
                     [p](const Point2& x) { return Sym2{0.0, 0.0, p * (p - 1.0) * std::pow(positive_part(x.y), p - 2.0)}; },
                     zero,
                     BoundaryDatum(PowerSum::abs_power(1.0, 4.0 * p), 4, 4.0 * prm.alpha),
                     Regularity::C1Alpha,
                     prm.alpha,
                     4.0 * prm.alpha,
                     true,
                     true,
                     false};
    out.push_back(std::move(c));
  }
  {
    const double d = prm.delta, s = prm.sigma;
    auto w = [d, s](const Point2& x) {
      if (x.y <= 0.0) return 0.0;
      return -x.y / std::log(x.y) + d * x.x * x.x * std::pow(x.y, s);
    };
    auto g = [d, s](const Point2& x) {
      const double l = std::log(x.y);
      return Vec2{2.0 * d * x.x * std::pow(x.y, s), -1.0 / l + 1.0 / (l * l) + d * s * x.x * x.x * std::pow(x.y, s - 1.0)};
    };
    auto h = [d, s](const Point2& x) {
      const double l = std::log(x.y);
      return Sym2{2.0 * d * std::pow(x.y, s), 2.0 * d * s * x.x * std::pow(x.y, s - 1.0),
                  (l - 2.0) / (x.y * l * l * l) + d * s * (s - 1.0) * x.x * x.x * std::pow(x.y, s - 2.0)};
    };
    ClosedFormCase c{"log-barrier",
                     "w = -x2/log x2 + delta x1^2 x2^sigma; smooth trace but the solution is not C^{1,alpha}",
                     Domain2D::strip(quartic, prm.log_cap),
                     w,
                     g,
                     h,
                     [d, s](const Point2& x) {
                       const double l = std::log(x.y);
                       return d * std::pow(x.y, s - 1.0) / (l * l);
                     },
                     std::nullopt,
                     Regularity::NotC1Alpha,
                     nan,
                     4.0,
                     true,
                     true,
                     true};
    out.push_back(std::move(c));
  }
  {
    ClosedFormCase c{"lipschitz-failure",
                     "u = -x2^(1/2), trace -x1^2 violates P1; u is not Lipschitz at the flat point",
                     Domain2D::strip(quartic, 1.0),
                     [](const Point2& x) { return -std::sqrt(positive_part(x.y)); },
                     [](const Point2& x) { return Vec2{0.0, -0.5 / std::sqrt(x.y)}; },
                     [](const Point2& x) { return Sym2{0.0, 0.0, 0.25 * std::pow(x.y, -1.5)}; },
                     zero,
                     BoundaryDatum(PowerSum::monomial(-1.0, 2), 4, 4.0),
                     Regularity::NotLipschitz,
                     nan,
                     4.0,
                     false,
                     true,
                     false};
    out.push_back(std::move(c));
  }
  {
    ClosedFormCase c{"p2-failure",
                     "u = x2 + x2^(3/2), trace x1^4 + x1^6 violates P2; exponent 1/2 < beta/4",
                     Domain2D::strip(quartic, 1.0),
                     [](const Point2& x) {
                       const double y = positive_part(x.y);
                       return y + std::pow(y, 1.5);
                     },
                     [](const Point2& x) { return Vec2{0.0, 1.0 + 1.5 * std::sqrt(positive_part(x.y))}; },
                     [](const Point2& x) { return Sym2{0.0, 0.0, 0.75 / std::sqrt(x.y)}; },
                     zero,
                     BoundaryDatum(PowerSum::polynomial({0, 0, 0, 0, 1, 0, 1}), 4, prm.p2_beta),
                     Regularity::BelowC1BetaK,
                     0.5,
                     prm.p2_beta,
                     true,
                     false,
                     false};
    out.push_back(std::move(c));
  }
  return out;
}

inline ClosedFormCase find_case(const std::string& id, const CaseParameters& prm = {}) {
  for (auto& c : case_library(prm))
    if (c.id == id) return c;
  throw ParameterError("unknown case id: " + id);
}

// ---- polynomial inequalities ----

namespace detail {

inline void require_even(int k) {
  if (k < 2 || k % 2 != 0) throw ParameterError("k must be an even integer >= 2");
}

inline mpz_class binom_z(int n, int r) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
  return b;
}

}  // namespace detail

/// Expanded integer coefficients of P_k, lowest degree first (degree k-2).
inline std::vector<mpz_class> pk_coefficients(int k) {
  detail::require_even(k);
  std::vector<mpz_class> c(k - 1);
  for (int j = 0; j <= k - 2; ++j) c[j] = detail::binom_z(k, j);
  return c;
}

/// Expanded integer coefficients of Q_k (the t^k and t^{k-1} terms cancel).
inline std::vector<mpz_class> qk_coefficients(int k) {
  detail::require_even(k);
  std::vector<mpz_class> c(k - 1);
  for (int j = 0; j <= k - 2; ++j) c[j] = k * detail::binom_z(k - 1, j) - detail::binom_z(k, j);
  return c;
}

namespace detail {

inline double horner(const std::vector<mpz_class>& c, double t) {
  double s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * t + c[i].get_d();
  return s;
}

inline mpq_class horner(const std::vector<mpz_class>& c, const mpq_class& t) {
  mpq_class s = 0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * t + mpq_class(c[i]);
  return s;
}

}  // namespace detail

inline double pk(int k, double t) { return detail::horner(pk_coefficients(k), t); }
inline double qk(int k, double t) { return detail::horner(qk_coefficients(k), t); }

struct ReflectionCheck {
  int trials = 0;
  int mismatches = 0;
};

/// Q_k(t) == P_k(-(t+1)) in exact rational arithmetic at random doubles t.
inline ReflectionCheck reflection_check(int k, int trials, std::uint64_t seed, double range = 1e3) {
  const auto p = pk_coefficients(k), q = qk_coefficients(k);
  Rng rng(seed);
  ReflectionCheck r;
  r.trials = trials;
  for (int i = 0; i < trials; ++i) {
    const mpq_class t(rng.uniform(-range, range));
    const mpq_class s = -(t + 1);
    if (detail::horner(q, t) != detail::horner(p, s)) ++r.mismatches;
  }
  return r;
}

struct SandwichConstants {
  int k = 0;
  double lower = 0.0;  // min of the ratio
  double upper = 0.0;  // max of the ratio
  double argmin = 0.0;
  double argmax = 0.0;
  double asymptotic = 0.0;        // ratio at |t| = 1e4 (mean of both signs)
  double expected_asymptotic = 0.0;  // leading coefficient over the denominator's
};

/// Asymptotic ratio of P_k(t)/(t^{k-2}+1). For k = 2 the denominator is the
/// constant 2, so the limit is 1/2 rather than the leading coefficient.
inline double expected_asymptotic(int k) {
  detail::require_even(k);
  return k == 2 ? 0.5 : 0.5 * k * (k - 1);
}

namespace detail {

inline std::vector<double> sandwich_grid(double lo, double hi, int samples) {
  // dense core on [-10, 10] plus log-spaced tails out to the range ends
  std::vector<double> t;
  const int core = samples / 2, tail = samples / 4;
  const double clo = std::max(lo, -10.0), chi = std::min(hi, 10.0);
  for (int i = 0; i < core; ++i) t.push_back(clo + (chi - clo) * i / (core - 1));
  for (int i = 0; i < tail; ++i) {
    const double f = static_cast<double>(i) / (tail - 1);
    if (hi > 10.0) t.push_back(10.0 * std::pow(hi / 10.0, f));
    if (lo < -10.0) t.push_back(-10.0 * std::pow(-lo / 10.0, f));
  }
  std::sort(t.begin(), t.end());
  return t;
}

inline double golden(const std::function<double(double)>& f, double a, double b, bool minimize) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto F = [&](double x) { return minimize ? f(x) : -f(x); };
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = F(c), fd = F(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = F(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = F(d);
    }
  }
  return 0.5 * (a + b);
}

inline void extrema(const std::function<double(double)>& ratio, double lo, double hi, int samples,
                    SandwichConstants& out) {
  const auto t = sandwich_grid(lo, hi, samples);
  std::size_t imin = 0, imax = 0;
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    v[i] = ratio(t[i]);
    if (v[i] < v[imin]) imin = i;
    if (v[i] > v[imax]) imax = i;
  }
  auto refine = [&](std::size_t i, bool minimize, double& arg, double& val) {
    const double a = t[i > 0 ? i - 1 : i], b = t[i + 1 < t.size() ? i + 1 : i];
    arg = a < b ? golden(ratio, a, b, minimize) : t[i];
    val = ratio(arg);
    if (minimize ? v[i] < val : v[i] > val) {
      arg = t[i];
      val = v[i];
    }
  };
  refine(imin, true, out.argmin, out.lower);
  refine(imax, false, out.argmax, out.upper);
}

}  // namespace detail

/// Extrema of P_k(t)/(t^{k-2}+1) over [-range, range].
inline SandwichConstants sandwich_constants(int k, double range = 1e3, int samples = 40000) {
  if (range < 1e3) throw ParameterError("sandwich_constants: range must cover [-1e3, 1e3]");
  const auto c = pk_coefficients(k);
  auto ratio = [&c, k](double t) { return detail::horner(c, t) / (std::pow(t, k - 2) + 1.0); };
  SandwichConstants s;
  s.k = k;
  detail::extrema(ratio, -range, range, samples, s);
  s.asymptotic = 0.5 * (ratio(1e4) + ratio(-1e4));
  s.expected_asymptotic = expected_asymptotic(k);
  return s;
}

/// Extrema of Q_k(t)/(t^{k-2}+1): the constants of the second inequality.
inline SandwichConstants q_sandwich_constants(int k, double range = 1e3, int samples = 40000) {
  if (range < 1e3) throw ParameterError("q_sandwich_constants: range must cover [-1e3, 1e3]");
  const auto c = qk_coefficients(k);
  auto ratio = [&c, k](double t) { return detail::horner(c, t) / (std::pow(t, k - 2) + 1.0); };
  SandwichConstants s;
  s.k = k;
  detail::extrema(ratio, -range, range, samples, s);
  s.asymptotic = 0.5 * (ratio(1e4) + ratio(-1e4));
  s.expected_asymptotic = expected_asymptotic(k);
  return s;
}

/// Extrema of Q_k(t)/((t+1)^{k-2}+1) over the reflected range t = -(s+1),
/// s in [-range, range]; these equal the P_k constants.
inline SandwichConstants q_reflected_constants(int k, double range = 1e3, int samples = 40000) {
  const auto c = qk_coefficients(k);
  auto ratio = [&c, k](double t) { return detail::horner(c, t) / (std::pow(t + 1.0, k - 2) + 1.0); };
  SandwichConstants s;
  s.k = k;
  detail::extrema(ratio, -range - 1.0, range - 1.0, samples, s);
  s.expected_asymptotic = expected_asymptotic(k);
  s.asymptotic = 0.5 * (ratio(1e4) + ratio(-1e4));
  return s;
}

/// Stationary points of (6t^2+4t+1)/(t^2+1): t = (5 -+ sqrt 41)/4.
inline std::pair<double, double> quartic_ratio_extrema() {
  auto r = [](double t) { return (6 * t * t + 4 * t + 1) / (t * t + 1); };
  return {r((5.0 - std::sqrt(41.0)) / 4.0), r((5.0 + std::sqrt(41.0)) / 4.0)};
}

}  // namespace malab
