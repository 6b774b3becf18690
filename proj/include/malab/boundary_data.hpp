#pragma once

// Boundary data phi(x1) in the x1 chart near the flat point, the vanishing
// conditions on its derivatives at 0, and its behaviour under the flattening
// shear.

#include <malab/core.hpp>
#include <malab/geometry.hpp>
#include <malab/power_sum.hpp>

#include <sstream>
#include <vector>

namespace malab {

/// Largest integer strictly below beta.
inline int strict_floor(double beta) {
  if (!(beta > 0.0)) throw ParameterError("strict_floor: beta must be positive");
  const double f = std::floor(beta);
  return static_cast<int>(f == beta ? f - 1.0 : f);
}

class BoundaryDatum {
 public:
  BoundaryDatum(PowerSum value, int declared_k, double holder_order)
      : value_(std::move(value)), k_(declared_k), beta_(holder_order) {
    if (k_ < 2 || k_ % 2 != 0) throw ParameterError("BoundaryDatum: declared k must be even and >= 2");
    if (!(beta_ > 0.0)) throw ParameterError("BoundaryDatum: holder order must be positive");
  }

  static BoundaryDatum polynomial(const std::vector<double>& coeffs, int k, double beta) {
    return BoundaryDatum(PowerSum::polynomial(coeffs), k, beta);
  }

  const PowerSum& function() const { return value_; }
  int declared_k() const { return k_; }
  double holder_order() const { return beta_; }
  /// Highest derivative order the conditions may query.
  int required_order() const { return k_ + strict_floor(beta_); }

  double operator()(double x1) const { return value_(x1); }
  double derivative(double x1, int n) const { return value_.derivative(x1, n); }

  std::string to_record() const {
    std::ostringstream os;
    os.precision(17);
    os << "k=" << k_ << " beta=" << beta_ << " coeffs=";
    const auto c = value_.expand();
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    return os.str();
  }

 private:
  PowerSum value_;
  int k_;
  double beta_;
};

/// Polynomial obstacle sum c[i][j] x1^i x2^j.
class BivariatePolynomial {
 public:
  explicit BivariatePolynomial(std::vector<std::vector<double>> coeffs) : c_(std::move(coeffs)) {}

  double operator()(const Point2& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < c_[i].size(); ++j)
        if (c_[i][j] != 0.0) s += c_[i][j] * std::pow(x.x, static_cast<int>(i)) * std::pow(x.y, static_cast<int>(j));
    return s;
  }

  Vec2 gradient(const Point2& x) const { return {partial(x, 1, 0), partial(x, 0, 1)}; }

  /// d^{a+b} / dx1^a dx2^b at x.
  double partial(const Point2& x, int a, int b) const {
    double s = 0.0;
    for (std::size_t i = static_cast<std::size_t>(a); i < c_.size(); ++i)
      for (std::size_t j = static_cast<std::size_t>(b); j < c_[i].size(); ++j) {
        if (c_[i][j] == 0.0) continue;
        double f = 1.0;
        for (int t = 0; t < a; ++t) f *= static_cast<double>(i - t);
        for (int t = 0; t < b; ++t) f *= static_cast<double>(j - t);
        s += c_[i][j] * f * std::pow(x.x, static_cast<int>(i) - a) * std::pow(x.y, static_cast<int>(j) - b);
      }
    return s;
  }

  int degree() const {
    int d = 0;
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < c_[i].size(); ++j)
        if (c_[i][j] != 0.0) d = std::max(d, static_cast<int>(i + j));
    return d;
  }

  double scale() const {
    double s = 0.0;
    for (const auto& row : c_)
      for (double v : row) s = std::max(s, std::abs(v));
    return s;
  }

 private:
  std::vector<std::vector<double>> c_;
};

enum class Condition { P1, P1Prime, P2, P3 };

inline const char* condition_name(Condition c) {
  switch (c) {
    case Condition::P1: return "P1";
    case Condition::P1Prime: return "P1'";
    case Condition::P2: return "P2";
    case Condition::P3: return "P3";
  }
  return "?";
}

struct ConditionResidual {
  int order = 0;     // derivative order (total order for P3)
  int order_x2 = 0;  // x2 part of a mixed partial (P3 only)
  double magnitude = 0.0;
};

struct ConditionReport {
  Condition which = Condition::P1;
  double tolerance = 0.0;
  std::vector<ConditionResidual> residuals;
  bool pass = true;

  /// First failing residual, if any.
  const ConditionResidual* first_failure() const {
    for (const auto& r : residuals)
      if (r.magnitude > tolerance) return &r;
    return nullptr;
  }
  friend bool operator==(const ConditionReport& a, const ConditionReport& b) {
    if (a.which != b.which || a.pass != b.pass || a.residuals.size() != b.residuals.size()) return false;
    for (std::size_t i = 0; i < a.residuals.size(); ++i)
      if (a.residuals[i].order != b.residuals[i].order || a.residuals[i].magnitude != b.residuals[i].magnitude)
        return false;
    return true;
  }
};

namespace detail {

inline ConditionReport finish(ConditionReport r) {
  r.pass = r.first_failure() == nullptr;
  return r;
}

inline double default_tolerance(double scale) { return 1e-9 * std::max(1.0, scale); }

}  // namespace detail

/// P1: phi^(i)(0) = 0 for even i in 2..k-2. P1': all i in 2..k-1.
/// P2: i in k+1..k+[beta]. Negative tol selects the default 1e-9 * scale.
inline ConditionReport check_condition(const BoundaryDatum& datum, Condition which, double tol = -1.0) {
  if (which == Condition::P3) throw ParameterError("check_condition: P3 applies to a two-variable obstacle");
  ConditionReport r;
  r.which = which;
  r.tolerance = tol >= 0.0 ? tol : detail::default_tolerance(datum.function().scale());
  const int k = datum.declared_k();
  int lo = 2, hi = k - 2, step = 2;
  if (which == Condition::P1Prime) {
    hi = k - 1;
    step = 1;
  } else if (which == Condition::P2) {
    lo = k + 1;
    hi = k + strict_floor(datum.holder_order());
    step = 1;
  }
  for (int i = lo; i <= hi; i += step) {
    if (datum.function().smoothness_at(0.0, i) < i) {
      std::ostringstream os;
      os << "check_condition: datum has no derivative of order " << i << " at 0";
      throw CapabilityError(os.str());
    }
    r.residuals.push_back({i, 0, std::abs(datum.derivative(0.0, i))});
  }
  return detail::finish(std::move(r));
}

/// P3: every partial derivative of total order 2..max_order of w vanishes at
/// the flat point.
inline ConditionReport check_condition(const BivariatePolynomial& w, int k, double beta, double tol = -1.0) {
  ConditionReport r;
  r.which = Condition::P3;
  r.tolerance = tol >= 0.0 ? tol : detail::default_tolerance(w.scale());
  const int top = k + strict_floor(beta);
  for (int n = 2; n <= top; ++n)
    for (int b = 0; b <= n; ++b) r.residuals.push_back({n, b, std::abs(w.partial({0.0, 0.0}, n - b, b))});
  return detail::finish(std::move(r));
}

/// x1 -> phi(x1) - a0 - a1 x1 - a2 rho(x1), the trace of u minus an affine function.
inline BoundaryDatum subtract_affine(const BoundaryDatum& datum, const BoundaryProfile& profile, double a0, double a1,
                                     double a2) {
  PowerSum v = datum.function() - PowerSum::polynomial({a0, a1}) - profile.function().scaled(a2);
  return BoundaryDatum(std::move(v), datum.declared_k(), datum.holder_order());
}

/// Datum in flattened coordinates, extended to the region above the boundary
/// by keeping it constant in y2.
class ExtendedDatum {
 public:
  ExtendedDatum(PowerSum trace, BoundaryProfile rho_tilde, int k, double beta)
      : trace_(std::move(trace)), rho_(std::move(rho_tilde)), k_(k), beta_(beta) {}

  double operator()(double y1) const {
    require(y1);
    return trace_(y1);
  }
  double operator()(const Point2& y) const { return (*this)(y.x); }
  double derivative(double y1, int n) const {
    require(y1);
    return trace_.derivative(y1, n);
  }
  const PowerSum& trace() const { return trace_; }
  const BoundaryProfile& rho_tilde() const { return rho_; }
  int declared_k() const { return k_; }
  double holder_order() const { return beta_; }

 private:
  void require(double y1) const {
    if (!rho_.in_window(y1)) throw DomainError("ExtendedDatum: y1 outside the transformed window");
  }
  PowerSum trace_;
  BoundaryProfile rho_;
  int k_;
  double beta_;
};

/// phi~(y1) = phi(x1(y1)) for the shear produced by tangent_transform, whose
/// first component is x1 = y1 + z1.
inline ExtendedDatum pullback(const BoundaryDatum& datum, const AffineMap2D& map, const BoundaryProfile& rho_tilde) {
  if (map.a11 != 1.0 || map.a12 != 0.0 || map.determinant() != 1.0)
    throw ParameterError("pullback: map must be a flattening shear");
  const double z1 = -map.offset.x;
  if (z1 != rho_tilde.origin()) throw ParameterError("pullback: map and transformed profile use different base points");
  return ExtendedDatum(datum.function().shifted(z1), rho_tilde, datum.declared_k(), datum.holder_order());
}

struct TaylorGrowthReport {
  double c1 = 0.0;           // least C with phi~ - phi~(0) - phi~'(0) y1 <= C rho~
  double argmax = 0.0;       // y1 attaining it
  double phi_k = 0.0;        // phi~^(k)(0)
  RatioRange e1_ratio;       // E1 / rho~
  double e2_constant = 0.0;  // max |E2| / ((kappa^{beta/(k-2)} + rho~^{beta/k}) rho~)
  std::size_t samples = 0;
};

/// Raised when the growth bound is requested for data violating P1.
class ConditionError : public std::runtime_error {
 public:
  explicit ConditionError(ConditionReport report)
      : std::runtime_error(std::string("condition ") + condition_name(report.which) + " violated"),
        report_(std::move(report)) {}
  const ConditionReport& report() const noexcept { return report_; }

 private:
  ConditionReport report_;
};

/// Samples y1 log-spaced in [1e-4 delta, delta] on both sides. `original` is
/// the datum before pullback and is used for the P1 precondition.
inline TaylorGrowthReport taylor_growth_bound(const BoundaryDatum& original, const ExtendedDatum& phi,
                                              double delta, int samples_per_side = 400) {
  const auto p1 = check_condition(original, Condition::P1);
  if (!p1.pass) throw ConditionError(p1);
  const BoundaryProfile& rt = phi.rho_tilde();
  const int k = phi.declared_k();
  const double beta = phi.holder_order();
  const double z1 = rt.origin();
  const double kappa = rt.derivative(0.0, 2);
  const double f0 = phi(0.0), f1 = phi.derivative(0.0, 1);
  TaylorGrowthReport rep;
  rep.c1 = -kInf;
  rep.phi_k = phi.derivative(0.0, k);
  const double closeness = k > 2 ? std::pow(std::abs(kappa), beta / (k - 2)) : 1.0;
  for (int side = -1; side <= 1; side += 2) {
    for (int i = 0; i < samples_per_side; ++i) {
      const double y = side * delta * std::pow(1e-4, 1.0 - static_cast<double>(i) / (samples_per_side - 1));
      if (!rt.in_window(y)) continue;
      const double r = rt(y);
      if (!(r > 0.0)) continue;
      const double excess = phi(y) - f0 - f1 * y;
      const double c = excess / r;
      if (c > rep.c1) {
        rep.c1 = c;
        rep.argmax = y;
      }
      const double e1 = (std::pow(y + z1, k) - std::pow(z1, k) - k * y * std::pow(z1, k - 1)) / factorial(k);
      rep.e1_ratio.add(e1 / r);
      const double e2 = excess - rep.phi_k * e1;
      rep.e2_constant = std::max(rep.e2_constant, std::abs(e2) / ((closeness + std::pow(r, beta / k)) * r));
      ++rep.samples;
    }
  }
  if (rep.samples == 0) throw ParameterError("taylor_growth_bound: no admissible samples in the window");
  return rep;
}

}  // namespace malab
