#pragma once

// Measurements of regularity at a point: gradient sups, support planes,
// log-log exponent fits of u - l against the radius, pointwise C^{1,alpha}
// seminorms, sub-level section balance and decay, and tangential-derivative
// growth along the boundary.

#include <malab/core.hpp>
#include <malab/domain.hpp>
#include <malab/envelope.hpp>
#include <malab/solver.hpp>

#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace malab {

/// A function on the closed domain with value and gradient access.
struct FieldView {
  std::function<double(const Point2&)> value;
  std::function<Vec2(const Point2&)> gradient;
  const Domain2D* domain = nullptr;
};

inline FieldView view(const PiecewiseAffineConvexFunction& u, const Domain2D& d) {
  return {[&u](const Point2& x) { return u(x); }, [&u](const Point2& x) { return u.gradient(x); }, &d};
}

inline FieldView view(const ScalarField2D& u, const Domain2D& d) {
  return {[&u](const Point2& x) { return u(x); }, [&u](const Point2& x) { return u.gradient(x); }, &d};
}

inline FieldView view(std::function<double(const Point2&)> value, std::function<Vec2(const Point2&)> gradient,
                      const Domain2D& d) {
  return {std::move(value), std::move(gradient), &d};
}

inline double gradient_sup(const PiecewiseAffineConvexFunction& u) { return u.max_gradient_norm(); }

inline double gradient_sup(const ScalarField2D& u) {
  double m = 0.0;
  for (std::size_t k = 0; k < u.unknowns(); ++k) m = std::max(m, norm(u.node_gradient(k)));
  return m;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ intercept + slope x.
inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ParameterError("least_squares: need at least two paired samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

/// Radii r_j = top * 2^{-j} * diam from top = 1e-1 down past 1e-4.
inline std::vector<double> default_radii(double diameter, double top = 1e-1, double bottom = 1e-4) {
  std::vector<double> r;
  for (double t = top; t >= bottom * (1.0 - 1e-12) || r.size() < 4; t *= 0.5) r.push_back(t * diameter);
  if (r.back() > bottom * diameter) r.push_back(r.back() * 0.5);
  return r;
}

struct NormalLimit {
  AffinePlane plane;
  bool diverging = false;  // gradient norms blow up along the inner normal
  double growth_slope = 0.0;  // d log|Du| / d log t
};

/// Support plane at a boundary point as the one-sided limit of gradients along
/// the inner normal; interior points use the gradient directly.
inline NormalLimit support_at(const FieldView& u, const Point2& x0) {
  NormalLimit out;
  const Domain2D& d = *u.domain;
  const double diam = d.diameter();
  if (d.level(x0) < -1e-9 * diam) {
    out.plane = {x0, u.value(x0), u.gradient(x0)};
    return out;
  }
  const Vec2 n = d.inner_normal(x0);
  std::vector<double> lt, lg;
  Vec2 g;
  for (int j = 3; j <= 40; ++j) {
    const double t = diam * std::ldexp(1.0, -j);
    const Point2 x = x0 + t * n;
    if (!d.interior(x)) continue;
    g = u.gradient(x);
    lt.push_back(std::log(t));
    lg.push_back(std::log(std::max(norm(g), 1e-300)));
  }
  if (lt.size() >= 4) {
    const auto fit = least_squares(lt, lg);
    out.growth_slope = fit.slope;
    // sustained growth over the sampled decades means no finite limit
    const double rise = lg.back() - lg.front();
    out.diverging = fit.slope < -0.25 && rise > std::log(1e3);
  }
  out.plane = {x0, u.value(x0), g};
  return out;
}

enum class FitMode { Value, Gradient };

struct ExponentFit {
  Point2 x0;
  FitMode mode = FitMode::Value;
  std::vector<double> radii;
  std::vector<double> sups;
  double alpha = 0.0;
  double constant = 0.0;
  double r2 = 0.0;
  bool inconclusive = false;   // R^2 below 0.98
  bool sentinel = false;       // nonpositive sups: alpha = +inf
  bool lipschitz_failure = false;
};

namespace detail {

inline std::vector<Vec2> fan(std::optional<Vec2> direction, int count = 128) {
  if (direction) return {normalized(*direction)};
  std::vector<Vec2> out;
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * std::numbers::pi * i / count;
    out.push_back({std::cos(t), std::sin(t)});
  }
  return out;
}

}  // namespace detail

/// Value mode: sup over the fan of u - l_{x0} at each radius ~ C r^{1+alpha}.
/// Gradient mode: sup of |Du(x) - Du(x0)| ~ C r^alpha. A direction restricts
/// the fan to that ray.
inline ExponentFit holder_fit(const FieldView& u, const Point2& x0, std::vector<double> radii, FitMode mode,
                              std::optional<Vec2> direction = {}) {
  if (radii.size() < 4) throw ParameterError("holder_fit: need at least four radii");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  if (radii.front() / radii.back() < 100.0 * (1.0 - 1e-9)) throw ParameterError("holder_fit: radii must span two decades");
  const NormalLimit sup0 = support_at(u, x0);
  ExponentFit fit;
  fit.x0 = x0;
  fit.mode = mode;
  fit.radii = radii;
  fit.lipschitz_failure = sup0.diverging;
  const auto dirs = detail::fan(direction);
  for (double r : radii) {
    double s = -kInf;
    for (const Vec2& e : dirs) {
      const Point2 x = x0 + r * e;
      if (!u.domain->contains(x)) continue;
      const double v = mode == FitMode::Value ? u.value(x) - sup0.plane(x) : norm(u.gradient(x) - sup0.plane.gradient);
      s = std::max(s, v);
    }
    fit.sups.push_back(s);
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(fit.sups[i] > 0.0)) {
      fit.sentinel = true;
      continue;
    }
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(fit.sups[i]));
  }
  if (fit.sentinel || lx.size() < 4) {
    fit.sentinel = true;
    fit.alpha = kInf;
    return fit;
  }
  const auto lf = least_squares(lx, ly);
  fit.alpha = mode == FitMode::Value ? lf.slope - 1.0 : lf.slope;
  fit.constant = std::exp(lf.intercept);
  fit.r2 = lf.r2;
  fit.inconclusive = lf.r2 < 0.98;
  return fit;
}

inline ExponentFit holder_fit(const FieldView& u, const Point2& x0, FitMode mode, std::optional<Vec2> direction = {}) {
  return holder_fit(u, x0, default_radii(u.domain->diameter()), mode, direction);
}

/// max over fan x radii samples of (u - l_{x0}) / |x - x0|^{1+alpha}.
inline double c1alpha_seminorm(const FieldView& u, const Point2& x0, double alpha,
                               std::optional<std::vector<double>> radii = {}) {
  const auto rs = radii.value_or(default_radii(u.domain->diameter()));
  const NormalLimit s0 = support_at(u, x0);
  if (s0.diverging) return kInf;
  double c = 0.0;
  for (double r : rs)
    for (const Vec2& e : detail::fan({})) {
      const Point2 x = x0 + r * e;
      if (!u.domain->contains(x)) continue;
      c = std::max(c, (u.value(x) - s0.plane(x)) / std::pow(r, 1.0 + alpha));
    }
  return c;
}

struct SectionMeasure {
  double h = 0.0;
  double balance_min = 0.0;  // min over chords of the shorter / longer half
  double decay_max = 0.0;    // max over rays of (u - l0)(x0 + (z - x0)/2) / h
  bool convex = true;
};

struct SublevelReport {
  Point2 x0;
  double h0 = 0.0;  // largest h with the section inside the domain (sampled)
  std::vector<SectionMeasure> sections;
  double sigma = 0.0;  // min(balance, 1/2 - decay) over all sections
  bool valid() const { return !sections.empty() && sigma > 0.0 && sigma < 0.5; }
};

/// Sections S_h = {u < l0 + h} about an interior x0 for h = h0 2^{-j},
/// j = 1..levels, probed along a fan of rays.
inline SublevelReport sublevel_analysis(const FieldView& u, const Point2& x0, int levels = 6, int rays = 64) {
  const Domain2D& d = *u.domain;
  if (!d.interior(x0)) throw DomainError("sublevel_analysis: base point must be interior");
  SublevelReport rep;
  rep.x0 = x0;
  const AffinePlane l0 = support_at(u, x0).plane;
  auto excess = [&](const Point2& x) { return u.value(x) - l0(x); };
  double h0 = kInf;
  for (const auto& b : d.boundary_samples(512)) h0 = std::min(h0, excess(b.p));
  rep.h0 = std::max(h0, 0.0);
  if (!(h0 > 1e-12 * std::max(1.0, std::abs(u.value(x0))))) {
    rep.h0 = 0.0;
    return rep;
  }
  const auto dirs = detail::fan({}, rays);
  rep.sigma = 0.5;
  for (int j = 1; j <= levels; ++j) {
    const double h = h0 * std::ldexp(1.0, -j);
    SectionMeasure m;
    m.h = h;
    std::vector<double> t(dirs.size());
    bool inside = true;
    for (std::size_t i = 0; i < dirs.size() && inside; ++i) {
      const auto exit = d.ray_exit(x0, dirs[i], 2.0 * d.diameter());
      if (!exit || excess(x0 + *exit * dirs[i]) < h) {
        inside = false;
        break;
      }
      double a = 0.0, b = *exit;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        (excess(x0 + mid * dirs[i]) < h ? a : b) = mid;
      }
      t[i] = 0.5 * (a + b);
    }
    if (!inside) continue;
    m.balance_min = 1.0;
    for (std::size_t i = 0; i < dirs.size() / 2; ++i) {
      const double p = t[i], q = t[i + dirs.size() / 2];
      m.balance_min = std::min(m.balance_min, std::min(p, q) / std::max(p, q));
    }
    for (std::size_t i = 0; i < dirs.size(); ++i)
      m.decay_max = std::max(m.decay_max, excess(x0 + 0.5 * t[i] * dirs[i]) / h);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const Point2 a = x0 + t[i] * dirs[i];
      const Point2 b = x0 + t[(i + 1) % dirs.size()] * dirs[(i + 1) % dirs.size()];
      const Point2 c = x0 + t[(i + 2) % dirs.size()] * dirs[(i + 2) % dirs.size()];
      if (cross(b - a, c - b) < -1e-9 * norm(b - a) * norm(c - b)) m.convex = false;
    }
    rep.sigma = std::min({rep.sigma, m.balance_min, 0.5 - m.decay_max});
    rep.sections.push_back(m);
  }
  if (rep.sections.empty()) rep.sigma = 0.0;
  return rep;
}

struct TangentialReport {
  Point2 z;
  Vec2 tau;
  double target_exponent = 0.0;  // alpha / (1 + alpha)
  double constant = 0.0;         // least C with |u_tau(x) - u_tau(z)| <= C |x - z|^target
  double fitted_exponent = 0.0;  // log-log slope of the per-radius sups
  bool sentinel = false;         // u_tau constant on the samples
  bool lipschitz_failure = false;
  bool consistent() const { return lipschitz_failure ? false : sentinel || fitted_exponent >= target_exponent - 0.05; }
};

inline TangentialReport tangential_holder_check(const FieldView& u, const Point2& z, double alpha,
                                                std::optional<std::vector<double>> radii = {}) {
  const Domain2D& d = *u.domain;
  TangentialReport rep;
  rep.z = z;
  rep.tau = d.tangent(z);
  rep.target_exponent = alpha / (1.0 + alpha);
  const NormalLimit s0 = support_at(u, z);
  if (s0.diverging) {
    rep.lipschitz_failure = true;
    rep.constant = kInf;
    rep.fitted_exponent = 0.0;
    return rep;
  }
  const double ut0 = dot(s0.plane.gradient, rep.tau);
  const auto rs = radii.value_or(default_radii(d.diameter()));
  std::vector<double> lx, ly;
  const double scale = std::max(1.0, norm(s0.plane.gradient));
  for (double r : rs) {
    double s = 0.0;
    for (const Vec2& e : detail::fan({})) {
      const Point2 x = z + r * e;
      if (!d.contains(x)) continue;
      s = std::max(s, std::abs(dot(u.gradient(x), rep.tau) - ut0));
    }
    rep.constant = std::max(rep.constant, s / std::pow(r, rep.target_exponent));
    if (s > 1e-12 * scale) {
      lx.push_back(std::log(r));
      ly.push_back(std::log(s));
    }
  }
  if (lx.size() < 4) {
    rep.sentinel = true;
    rep.fitted_exponent = kInf;
  } else {
    rep.fitted_exponent = least_squares(lx, ly).slope;
  }
  return rep;
}

inline const char* mode_name(FitMode m) { return m == FitMode::Value ? "value" : "gradient"; }

inline void write_fit_csv(std::ostream& os, const std::vector<ExponentFit>& fits) {
  char buf[256];
  os << "x1,x2,mode,alpha,C,R2,rmin,rmax\n";
  for (const auto& f : fits) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", f.x0.x, f.x0.y, mode_name(f.mode),
                  f.alpha, f.constant, f.r2, f.radii.back(), f.radii.front());
    os << buf;
  }
}

}  // namespace malab
