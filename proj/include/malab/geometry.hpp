#pragma once

// Boundary profiles x2 = rho(x1) near a degenerate boundary point, the unimodular
// boundary-flattening shear, and sample-based verifiers for the comparability
// and angle estimates in flattened coordinates.

#include <malab/core.hpp>
#include <malab/power_sum.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace malab {

/// A convex boundary graph x2 = rho(x1) on a validity window, together with the
/// degeneracy metadata (k, beta) and the leading Taylor coefficient at 0.
class BoundaryProfile {
 public:
  /// rho(x1) = leading * x1^k + remainder(x1) on [-half_width, half_width].
  /// Every remainder term must vanish at least like |x1|^{k+beta}.
  static BoundaryProfile degenerate(int k, double beta, double leading, PowerSum remainder, double half_width) {
    if (k < 2 || k % 2 != 0) throw ParameterError("BoundaryProfile: k must be an even integer >= 2");
    if (!(beta > 0.0) || beta > k) throw ParameterError("BoundaryProfile: beta must lie in (0, k]");
    if (!(leading > 0.0)) throw ParameterError("BoundaryProfile: leading coefficient must be positive");
    if (!(half_width > 0.0)) throw ParameterError("BoundaryProfile: half_width must be positive");
    for (const auto& t : remainder.terms()) {
      if (t.shift != 0.0) throw ParameterError("BoundaryProfile: remainder terms must be centred at 0");
      if (t.power < k + beta - 1e-12)
        throw ParameterError("BoundaryProfile: remainder term of power " + std::to_string(t.power) +
                             " is not O(|x1|^{k+beta})");
    }
    BoundaryProfile p;
    p.k_ = k;
    p.beta_ = beta;
    p.leading_ = leading;
    p.remainder_ = remainder;
    p.lo_ = -half_width;
    p.hi_ = half_width;
    p.rho_ = PowerSum::monomial(leading, k) + remainder;
    return p;
  }

  /// x1^k with no remainder; beta defaults to k (exact monomial).
  static BoundaryProfile monomial(int k, double half_width = 1.0, double leading = 1.0) {
    return degenerate(k, static_cast<double>(k), leading, PowerSum{}, half_width);
  }

  int k() const { return k_; }
  double beta() const { return beta_; }
  double leading_coeff() const { return leading_; }
  const PowerSum& remainder() const { return remainder_; }
  const PowerSum& function() const { return rho_; }
  double window_lo() const { return lo_; }
  double window_hi() const { return hi_; }
  double half_width() const { return std::min(-lo_, hi_); }
  /// Accumulated base-point offset: this profile is rho_orig(y + origin) - tangent.
  double origin() const { return origin_; }

  bool in_window(double x1) const {
    const double slack = 1e-12 * (hi_ - lo_);
    return x1 >= lo_ - slack && x1 <= hi_ + slack;
  }

  double operator()(double x1) const { return derivative(x1, 0); }

  double derivative(double x1, int order) const {
    require_window(x1);
    return rho_.derivative(x1, order);
  }

  /// Linear extension past the window ends, convex on the real line.
  double extended(double x1) const {
    if (x1 > hi_) return rho_(hi_) + rho_.derivative(hi_, 1) * (x1 - hi_);
    if (x1 < lo_) return rho_(lo_) + rho_.derivative(lo_, 1) * (x1 - lo_);
    return rho_(x1);
  }

  /// Smallest C with |remainder(x)| <= C |x|^{k+beta} over the given samples.
  double remainder_constant(const std::vector<double>& samples) const {
    if (origin_ != 0.0) throw ParameterError("remainder_constant: defined for untransformed profiles only");
    double c = 0.0;
    for (double x : samples) {
      if (x == 0.0 || !in_window(x)) continue;
      c = std::max(c, std::abs(remainder_(x)) / std::pow(std::abs(x), k_ + beta_));
    }
    return c;
  }

  /// Residuals of the k-order degeneracy conditions at 0: rho(0), rho'(0),
  /// rho^(i)(0) for 2 <= i <= k-1, and rho^(k)(0) - k! leading.
  std::vector<double> degeneracy_residuals() const {
    std::vector<double> r;
    r.push_back(derivative(0.0, 0));
    r.push_back(derivative(0.0, 1));
    for (int i = 2; i < k_; ++i) r.push_back(derivative(0.0, i));
    r.push_back(derivative(0.0, k_) - factorial(k_) * leading_);
    return r;
  }

  /// Minimum of rho'' over evenly spaced window samples (convexity check).
  double min_second_derivative(int samples = 257) const {
    double m = kInf;
    for (int i = 0; i < samples; ++i) {
      const double x = lo_ + (hi_ - lo_) * i / (samples - 1);
      m = std::min(m, rho_.derivative(x, 2));
    }
    return m;
  }

  /// Flat text record: k, beta, leading_coeff, remainder coefficients, half_width.
  std::string to_record() const {
    if (origin_ != 0.0) throw ParameterError("BoundaryProfile::to_record: transformed profiles are not serializable");
    std::ostringstream os;
    os.precision(17);
    os << "k=" << k_ << " beta=" << beta_ << " leading_coeff=" << leading_ << " remainder=";
    std::vector<double> poly;
    std::vector<PowerTerm> abs_terms;
    for (const auto& t : remainder_.terms()) {
      if (t.is_monomial()) {
        const auto m = static_cast<std::size_t>(t.power);
        if (poly.size() < m + 1) poly.resize(m + 1, 0.0);
        poly[m] += t.coeff;
      } else {
        abs_terms.push_back(t);
      }
    }
    if (poly.empty()) os << "0";
    for (std::size_t i = 0; i < poly.size(); ++i) os << (i ? "," : "") << poly[i];
    if (!abs_terms.empty()) {
      os << " remainder_abs=";
      for (std::size_t i = 0; i < abs_terms.size(); ++i) {
        if (abs_terms[i].odd) throw ParameterError("BoundaryProfile::to_record: odd non-monomial terms unsupported");
        os << (i ? "," : "") << abs_terms[i].coeff << "@" << abs_terms[i].power;
      }
    }
    os << " half_width=" << half_width();
    return os.str();
  }

  static BoundaryProfile from_record(const std::string& record) {
    std::map<std::string, std::string> kv;
    std::istringstream is(record);
    std::string tok;
    while (is >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParameterError("profile record: malformed token '" + tok + "'");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto need = [&](const char* key) -> const std::string& {
      auto it = kv.find(key);
      if (it == kv.end()) throw ParameterError(std::string("profile record: missing key ") + key);
      return it->second;
    };
    const int k = std::stoi(need("k"));
    const double beta = std::stod(need("beta"));
    const double lead = std::stod(need("leading_coeff"));
    const double hw = std::stod(need("half_width"));
    std::vector<PowerTerm> terms;
    const auto coeffs = split_numbers(need("remainder"));
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] != 0.0) terms.push_back({coeffs[i], static_cast<double>(i), i % 2 == 1, 0.0});
    if (auto it = kv.find("remainder_abs"); it != kv.end()) {
      std::istringstream ts(it->second);
      std::string item;
      while (std::getline(ts, item, ',')) {
        const auto at = item.find('@');
        if (at == std::string::npos) throw ParameterError("profile record: remainder_abs expects c@p");
        terms.push_back({std::stod(item.substr(0, at)), std::stod(item.substr(at + 1)), false, 0.0});
      }
    }
    return degenerate(k, beta, lead, PowerSum(std::move(terms)), hw);
  }

  static std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
  }

 private:
  friend BoundaryProfile transformed_profile(const BoundaryProfile&, double);

  void require_window(double x1) const {
    if (!in_window(x1)) {
      std::ostringstream os;
      os << "BoundaryProfile: x1 = " << x1 << " outside validity window [" << lo_ << ", " << hi_ << "]";
      throw DomainError(os.str());
    }
  }

  int k_ = 2;
  double beta_ = 1.0;
  double leading_ = 1.0;
  PowerSum remainder_;
  double lo_ = -1.0;
  double hi_ = 1.0;
  double origin_ = 0.0;
  PowerSum rho_;
};

/// kappa = rho'' / (1 + rho'^2)^{3/2}. Exactly 0 at a flat point.
inline double curvature(const BoundaryProfile& profile, double x1) {
  const double d1 = profile.derivative(x1, 1);
  const double d2 = profile.derivative(x1, 2);
  if (d2 == 0.0) return 0.0;
  return d2 / std::pow(1.0 + d1 * d1, 1.5);
}

/// y = linear * x + offset.
struct AffineMap2D {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
  Vec2 offset;

  Point2 operator()(const Point2& x) const { return {a11 * x.x + a12 * x.y + offset.x, a21 * x.x + a22 * x.y + offset.y}; }
  Vec2 apply_linear(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
  double determinant() const { return a11 * a22 - a12 * a21; }

  AffineMap2D inverse() const {
    const double d = determinant();
    if (d == 0.0) throw GeometryError("AffineMap2D: singular map");
    AffineMap2D inv;
    inv.a11 = a22 / d;
    inv.a12 = -a12 / d;
    inv.a21 = -a21 / d;
    inv.a22 = a11 / d;
    const Vec2 o = inv.apply_linear(offset);
    inv.offset = {-o.x, -o.y};
    return inv;
  }

  friend AffineMap2D compose(const AffineMap2D& outer, const AffineMap2D& inner) {
    AffineMap2D m;
    m.a11 = outer.a11 * inner.a11 + outer.a12 * inner.a21;
    m.a12 = outer.a11 * inner.a12 + outer.a12 * inner.a22;
    m.a21 = outer.a21 * inner.a11 + outer.a22 * inner.a21;
    m.a22 = outer.a21 * inner.a12 + outer.a22 * inner.a22;
    m.offset = outer.apply_linear(inner.offset) + outer.offset;
    return m;
  }
};

/// Shear-translation taking (z1, rho(z1)) to the origin and the tangent line
/// there to {y2 = 0}: y1 = x1 - z1, y2 = x2 - rho(z1) - rho'(z1)(x1 - z1).
/// The linear part is unit lower triangular, so the determinant is exactly 1.
inline AffineMap2D tangent_transform(const BoundaryProfile& profile, double z1) {
  if (!(z1 > profile.window_lo() && z1 < profile.window_hi()))
    throw DomainError("tangent_transform: base point outside the open validity window");
  const double r0 = profile.derivative(z1, 0);
  const double r1 = profile.derivative(z1, 1);
  AffineMap2D m;
  m.a21 = -r1;
  m.offset = {-z1, r1 * z1 - r0};
  return m;
}

/// rho~(y1) = rho(y1 + z1) - rho(z1) - rho'(z1) y1, the boundary in flattened
/// coordinates. Window shifts with the base point.
inline BoundaryProfile transformed_profile(const BoundaryProfile& profile, double z1) {
  if (!(std::abs(z1) < 0.5 * profile.half_width()))
    throw DomainError("transformed_profile: |z1| must be below half the validity half-width");
  const double r0 = profile.derivative(z1, 0);
  const double r1 = profile.derivative(z1, 1);
  BoundaryProfile t = profile;
  t.rho_ = profile.rho_.shifted(z1) - PowerSum::polynomial({r0, r1});
  t.lo_ = profile.lo_ - z1;
  t.hi_ = profile.hi_ - z1;
  t.origin_ = profile.origin_ + z1;
  const int k = profile.k_;
  t.leading_ = t.rho_.derivative(0.0, k) / factorial(k);
  t.remainder_ = t.rho_ - PowerSum::monomial(t.leading_, k);
  return t;
}

struct RatioRange {
  double min = kInf;
  double max = -kInf;
  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
  }
  /// Smallest C with all samples in [1/C, C]; infinite if any sample <= 0.
  double bound() const {
    if (!(min > 0.0)) return kInf;
    return std::max(max, 1.0 / min);
  }
};

struct ComparabilityReport {
  double z1 = 0.0;
  double kappa = 0.0;
  std::size_t samples = 0;
  RatioRange value;   // rho~ / (kappa y^2 + |y|^k)
  RatioRange slope;   // y rho~' / (...)
  RatioRange excess;  // (y rho~' - rho~) / (...)
  double bound() const { return std::max({value.bound(), slope.bound(), excess.bound()}); }
  bool all_positive_finite() const { return std::isfinite(bound()); }
};

/// Samples |y1| log-spaced in [1e-4 delta, delta] on both sides of 0. delta
/// defaults to half the distance from 0 to the nearer window edge.
inline ComparabilityReport profile_comparability(const BoundaryProfile& profile, double z1, int sample_count,
                                                 std::optional<double> delta = std::nullopt) {
  if (sample_count < 16) throw ParameterError("profile_comparability: need at least 16 samples");
  const BoundaryProfile rt = transformed_profile(profile, z1);
  const double d = delta.value_or(0.5 * std::min(-rt.window_lo(), rt.window_hi()));
  ComparabilityReport rep;
  rep.z1 = z1;
  rep.kappa = curvature(profile, z1);
  const int k = profile.k();
  const int half = sample_count / 2;
  for (int side = -1; side <= 1; side += 2) {
    for (int i = 0; i < half; ++i) {
      const double mag = d * std::pow(1e-4, 1.0 - static_cast<double>(i) / (half - 1));
      const double y = side * mag;
      const double den = rep.kappa * y * y + std::pow(mag, k);
      const double r = rt(y);
      const double dr = rt.derivative(y, 1);
      rep.value.add(r / den);
      rep.slope.add(y * dr / den);
      rep.excess.add((y * dr - r) / den);
      ++rep.samples;
    }
  }
  return rep;
}

struct AngleSample {
  double height = 0.0;  // y2 of the base point (0, y2)
  Point2 p;             // boundary point in flattened coordinates
  double theta = 0.0;   // angle between the tangent at p and p - (0, y2)
  double ratio = 0.0;   // theta / y2^{(k-1)/k}
  bool above = false;   // p2 > y2
};

struct AngleReport {
  std::vector<AngleSample> samples;
  double min_ratio = kInf;
  double min_ratio_above = kInf;  // restricted to p2 > y2
  double min_ratio_below = kInf;  // restricted to p2 <= y2
  std::optional<AngleSample> argmin;
  bool empty() const { return samples.empty(); }
};

namespace detail {

// Root of rho~(t) = level on the branch from 0 toward `end` (rho~ monotone there).
inline double branch_root(const BoundaryProfile& rt, double end, double level) {
  if (rt(end) <= level) return end;
  double a = 0.0, b = end;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    (rt(m) < level ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// For each base height y2 and boundary points p of the flattened boundary with
/// 0 < p2 <= 2 y2 on both branches (p1 != 0), the angle between the boundary
/// tangent at p and the direction p - (0, y2), normalised by y2^{(k-1)/k}.
inline AngleReport angle_bound_check(const BoundaryProfile& profile, double z1, const std::vector<double>& heights,
                                     int samples_per_branch = 256) {
  const BoundaryProfile rt = transformed_profile(profile, z1);
  const double expo = static_cast<double>(profile.k() - 1) / profile.k();
  AngleReport rep;
  for (double y2 : heights) {
    if (!(y2 > 0.0)) throw ParameterError("angle_bound_check: heights must be positive");
    const double scale = std::pow(y2, expo);
    for (double end : {rt.window_lo(), rt.window_hi()}) {
      const double reach = detail::branch_root(rt, end, 2.0 * y2);
      for (int i = 0; i < samples_per_branch; ++i) {
        const double p1 = reach * std::pow(1e-6, 1.0 - static_cast<double>(i) / (samples_per_branch - 1));
        const double p2 = rt(p1);
        if (!(p2 > 0.0) || p2 > 2.0 * y2) continue;
        const Vec2 tau{1.0, rt.derivative(p1, 1)};
        const Vec2 e{p1, p2 - y2};
        const double theta = std::atan2(std::abs(cross(tau, e)), std::abs(dot(tau, e)));
        AngleSample s{y2, {p1, p2}, theta, theta / scale, p2 > y2};
        rep.samples.push_back(s);
        if (s.ratio < rep.min_ratio) {
          rep.min_ratio = s.ratio;
          rep.argmin = s;
        }
        if (s.above)
          rep.min_ratio_above = std::min(rep.min_ratio_above, s.ratio);
        else
          rep.min_ratio_below = std::min(rep.min_ratio_below, s.ratio);
      }
    }
  }
  return rep;
}

}  // namespace malab
