#pragma once

// Explicit lower barriers w(y) = 1/2 y1^2 y2^a + Q y2^q - M y2 on the flattened
// boundary layer {rho~(y1) < y2 < h}, with a = q - 1/2 for k = 4 and
// a = q - 2/k in general, plus grid certification of det D^2 w >= f0 inside
// and w <= 0 on the boundary of the layer.

#include <malab/core.hpp>
#include <malab/geometry.hpp>

#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

namespace malab {

struct BarrierSpec {
  int k = 4;
  double q = 9.0 / 8.0;
  double Q = 9.0;
  double M = 5.0;
  double h = 1.0 / 256.0;
  double f0 = 1.0;
  bool det_condition_vacuous = false;  // f0 == 0: only the boundary inequality matters
  bool height_capped = false;          // h was limited by the cap, not by the f0 rule

  /// Exponent of y2 multiplying y1^2 / 2.
  double a() const { return k == 4 ? q - 0.5 : q - 2.0 / k; }
};

/// Open interval of admissible q.
inline std::pair<double, double> barrier_q_interval(int k) {
  if (k < 4 || k % 2 != 0) throw ParameterError("barrier: k must be an even integer >= 4");
  return {1.0, k == 4 ? 1.25 : 1.0 + 1.0 / k};
}

/// Largest h the f0 rule allows: (4 f0)^{2/(4q-5)} for k = 4 and
/// (k f0 / (2k - 4))^{1/(2q - 2/k - 2)} otherwise. Infinite for f0 = 0.
inline double barrier_height_threshold(int k, double q, double f0) {
  if (f0 == 0.0) return kInf;
  if (k == 4) return std::pow(4.0 * f0, 2.0 / (4.0 * q - 5.0));
  return std::pow(k * f0 / (2.0 * k - 4.0), 1.0 / (2.0 * q - 2.0 / k - 2.0));
}

/// Parameters by the selection rules. q defaults to the midpoint of its open
/// interval; h is the f0 threshold limited by height_cap. sup_u is accepted for
/// the gradient bound and does not affect the parameters.
inline BarrierSpec default_parameters(int k, double f0, double sup_u = 0.0, std::optional<double> q_override = {},
                                      double height_cap = 1.0) {
  const auto [qlo, qhi] = barrier_q_interval(k);
  if (f0 < 0.0 || !std::isfinite(f0)) throw ParameterError("default_parameters: f0 must be finite and >= 0");
  if (sup_u < 0.0) throw ParameterError("default_parameters: sup_u must be >= 0");
  if (!(height_cap > 0.0)) throw ParameterError("default_parameters: height cap must be positive");
  BarrierSpec s;
  s.k = k;
  s.f0 = f0;
  s.q = q_override.value_or(0.5 * (qlo + qhi));
  if (!(s.q > qlo && s.q < qhi)) throw ParameterError("default_parameters: q outside its open admissible interval");
  s.Q = k == 4 ? s.q / (s.q - 1.0) : (k / (s.q - 1.0)) * (s.q + 1.0 - 4.0 / k);
  const double threshold = barrier_height_threshold(k, s.q, f0);
  s.det_condition_vacuous = f0 == 0.0;
  s.height_capped = threshold > height_cap;
  s.h = std::min(threshold, height_cap);
  s.M = ((k == 4 ? 1.0 : static_cast<double>(k)) + s.Q) * std::pow(s.h, s.q - 1.0);
  return s;
}

/// Largest height for which the layer {rho~ < y2 < h} stays inside the window.
inline double admissible_height(const BoundaryProfile& rho_tilde) {
  return std::min(rho_tilde(rho_tilde.window_lo()), rho_tilde(rho_tilde.window_hi()));
}

struct BarrierValue {
  double value = 0.0;
  Vec2 gradient;
  Sym2 hessian;
};

inline void require_positive_height(const Point2& y) {
  if (!(y.y > 0.0)) throw DomainError("barrier: y2 must be positive");
}

inline BarrierValue evaluate(const BarrierSpec& s, const Point2& y) {
  require_positive_height(y);
  const double a = s.a(), q = s.q;
  const double y1 = y.x, y2 = y.y;
  const double pa = std::pow(y2, a), pq = std::pow(y2, q);
  BarrierValue r;
  r.value = 0.5 * y1 * y1 * pa + s.Q * pq - s.M * y2;
  r.gradient = {y1 * pa, 0.5 * a * y1 * y1 * pa / y2 + s.Q * q * pq / y2 - s.M};
  r.hessian.xx = pa;
  r.hessian.xy = a * y1 * pa / y2;
  r.hessian.yy = 0.5 * a * (a - 1.0) * y1 * y1 * pa / (y2 * y2) + s.Q * q * (q - 1.0) * pq / (y2 * y2);
  return r;
}

/// Closed form q(q-1)Q y2^{a+q-2} - a(a+1)/2 y1^2 y2^{2a-2}.
inline double hessian_det(const BarrierSpec& s, const Point2& y) {
  require_positive_height(y);
  const double a = s.a(), q = s.q;
  return q * (q - 1.0) * s.Q * std::pow(y.y, a + q - 2.0) - 0.5 * a * (a + 1.0) * y.x * y.x * std::pow(y.y, 2.0 * a - 2.0);
}

struct CertificationSample {
  Point2 y;
  double det_margin = 0.0;  // det D^2 w - f0
};

struct CertificationReport {
  std::size_t interior_samples = 0;
  std::size_t boundary_samples = 0;
  double min_det_margin = kInf;
  Point2 worst_interior;
  double max_boundary_value = -kInf;
  Point2 worst_boundary;
  bool det_pass = false;
  bool boundary_pass = false;
  std::vector<CertificationSample> rows;  // filled when requested

  bool pass() const { return det_pass && boundary_pass; }

  void merge(const CertificationReport& o) {
    interior_samples += o.interior_samples;
    boundary_samples += o.boundary_samples;
    if (o.min_det_margin < min_det_margin) {
      min_det_margin = o.min_det_margin;
      worst_interior = o.worst_interior;
    }
    if (o.max_boundary_value > max_boundary_value) {
      max_boundary_value = o.max_boundary_value;
      worst_boundary = o.worst_boundary;
    }
    det_pass = min_det_margin >= 0.0;
    boundary_pass = max_boundary_value <= 0.0;
    rows.insert(rows.end(), o.rows.begin(), o.rows.end());
  }
};

/// resolution rows of y2, geometric in [h / resolution^2, h], each with
/// resolution points across the layer clustered toward the lower boundary;
/// the boundary is sampled along rho~ (graded toward 0) and along y2 = h.
inline CertificationReport certify(const BarrierSpec& s, const BoundaryProfile& rho_tilde, int resolution,
                                   bool keep_rows = false) {
  if (resolution < 4) throw ParameterError("certify: resolution must be at least 4");
  if (s.h > admissible_height(rho_tilde) * (1.0 + 1e-12))
    throw DomainError("certify: layer height exceeds the transformed profile window");
  const double lo_end = detail::branch_root(rho_tilde, rho_tilde.window_lo(), s.h);
  const double hi_end = detail::branch_root(rho_tilde, rho_tilde.window_hi(), s.h);
  CertificationReport rep;
  const double floor = s.h / (static_cast<double>(resolution) * resolution);
  const double n1 = resolution - 1;
  for (int j = 0; j < resolution; ++j) {
    const double y2 = floor * std::pow(s.h / floor, j / n1);
    const double l = detail::branch_root(rho_tilde, lo_end, y2);
    const double r = detail::branch_root(rho_tilde, hi_end, y2);
    for (int i = 0; i < resolution; ++i) {
      const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * i / n1));
      const Point2 y{l + (r - l) * t, y2};
      const double margin = s.det_condition_vacuous ? kInf : hessian_det(s, y) - s.f0;
      ++rep.interior_samples;
      if (keep_rows) rep.rows.push_back({y, margin});
      if (margin < rep.min_det_margin) {
        rep.min_det_margin = margin;
        rep.worst_interior = y;
      }
    }
  }
  auto boundary = [&](const Point2& y) {
    ++rep.boundary_samples;
    const double w = evaluate(s, y).value;
    if (w > rep.max_boundary_value) {
      rep.max_boundary_value = w;
      rep.worst_boundary = y;
    }
  };
  for (int i = 0; i < resolution; ++i) {
    const double t = 1e-6 * std::pow(1e6, i / n1);
    for (double end : {lo_end, hi_end}) {
      const double y1 = end * t;
      const double y2 = rho_tilde(y1);
      if (y2 > 0.0) boundary({y1, y2});
    }
    const double tt = i / n1;
    boundary({lo_end + (hi_end - lo_end) * tt, s.h});
  }
  rep.det_pass = rep.min_det_margin >= 0.0;
  rep.boundary_pass = rep.max_boundary_value <= 0.0;
  return rep;
}

/// The normal-derivative bound at the transformed origin: M + C1 + sup|u| / h.
inline double barrier_gradient_bound(const BarrierSpec& s, double c1, double sup_u) {
  return s.M + c1 + sup_u / s.h;
}

inline void write_certification_csv(std::ostream& os, const BarrierSpec& s, const CertificationReport& rep) {
  char buf[160];
  os << "y1,y2,det_minus_f0\n";
  for (const auto& row : rep.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", row.y.x, row.y.y, row.det_margin);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "# k=%d q=%.17g Q=%.17g M=%.17g h=%.17g f0=%.17g ", s.k, s.q, s.Q, s.M, s.h, s.f0);
  os << buf;
  std::snprintf(buf, sizeof buf, "min_det_margin=%.17g max_boundary_w=%.17g pass=%d\n", rep.min_det_margin,
                rep.max_boundary_value, rep.pass() ? 1 : 0);
  os << buf;
}

}  // namespace malab
