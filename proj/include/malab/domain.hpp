#pragma once

// Bounded convex planar domains: a degenerate lower profile closed by a convex
// cap polyline, or a disk. Membership goes through a convex level function whose
// zero set is the boundary.

#include <malab/core.hpp>
#include <malab/geometry.hpp>

#include <numbers>
#include <optional>
#include <variant>
#include <vector>

namespace malab {

struct BoundarySample {
  Point2 p;
  bool on_profile = false;  // lies on the lower profile graph
};

/// Points of [0, length] graded toward 0: uniform spacing d away from 0 and
/// geometric with ratio `ratio` below d*ratio/(ratio-1), down to
/// d*floor_fraction. Starts at 0, ends at length, has exactly `count` entries
/// whenever count exceeds the number of geometric layers plus two.
inline std::vector<double> graded_points(double length, int count, double ratio, double floor_fraction = 1e-2) {
  if (count < 2) throw ParameterError("graded_points: need at least two points");
  if (!(floor_fraction > 0.0 && floor_fraction < 1.0)) throw ParameterError("graded_points: floor fraction in (0,1)");
  std::vector<double> pts;
  const double knee = ratio > 1.0 ? ratio / (ratio - 1.0) : 0.0;
  // the layer count below the knee depends only on ratio and floor fraction
  const int layers = ratio > 1.0 ? static_cast<int>(std::floor(std::log(knee / floor_fraction) / std::log(ratio))) : 0;
  const int uniform = count - 2 - layers;
  if (ratio <= 1.0 || uniform < 1) {
    for (int i = 0; i < count; ++i) pts.push_back(length * i / (count - 1));
    return pts;
  }
  const double d = length / (uniform + knee);
  const double t_knee = knee * d;
  pts.push_back(0.0);
  for (int j = layers; j >= 1; --j) pts.push_back(t_knee * std::pow(ratio, -j));
  for (int j = 0; j <= uniform; ++j) pts.push_back(j == uniform ? length : t_knee + d * j);
  return pts;
}

class Domain2D {
 public:
  /// {rho(x1) < x2 < height}, closed by the horizontal cap x2 = height.
  static Domain2D strip(BoundaryProfile lower, double height) {
    if (!(height > 0.0)) throw ParameterError("Domain2D::strip: height must be positive");
    const double left = root_on_side(lower, lower.window_lo(), height);
    const double right = root_on_side(lower, lower.window_hi(), height);
    return with_cap(std::move(lower), {{right, height}, {left, height}});
  }

  /// Lower profile on [cap.back().x, cap.front().x]; cap runs counterclockwise
  /// from the right end of the profile to its left end.
  static Domain2D with_cap(BoundaryProfile lower, std::vector<Point2> cap) {
    if (cap.size() < 2) throw GeometryError("Domain2D: cap needs at least two vertices");
    const double a = cap.back().x, b = cap.front().x;
    if (!(a < 0.0 && b > 0.0)) throw GeometryError("Domain2D: profile span must contain the degenerate point");
    if (!lower.in_window(a) || !lower.in_window(b)) throw DomainError("Domain2D: profile ends outside the window");
    for (const Point2& e : {cap.front(), cap.back()})
      if (std::abs(lower(e.x) - e.y) > 1e-9 * (1.0 + std::abs(e.y)))
        throw GeometryError("Domain2D: cap endpoints must lie on the profile");
    Domain2D d;
    d.shape_ = ProfileShape{std::move(lower), a, b, std::move(cap)};
    return d;
  }

  static Domain2D disk(Point2 center, double radius) {
    if (!(radius > 0.0)) throw ParameterError("Domain2D::disk: radius must be positive");
    Domain2D d;
    d.shape_ = DiskShape{center, radius};
    return d;
  }

  const BoundaryProfile* lower_profile() const {
    if (auto* s = std::get_if<ProfileShape>(&shape_)) return &s->profile;
    return nullptr;
  }
  /// Profile span [a, b] in x1 (profile domains only).
  std::pair<double, double> profile_span() const {
    const auto& s = std::get<ProfileShape>(shape_);
    return {s.a, s.b};
  }

  /// Convex level function: negative inside, zero on the boundary.
  double level(const Point2& x) const {
    if (auto* s = std::get_if<DiskShape>(&shape_)) return norm(x - s->c) - s->r;
    const auto& s = std::get<ProfileShape>(shape_);
    double g = s.profile.extended(x.x) - x.y;
    for (std::size_t i = 0; i + 1 < s.cap.size(); ++i) {
      const Vec2 e = s.cap[i + 1] - s.cap[i];
      g = std::max(g, -cross(e, x - s.cap[i]) / norm(e));
    }
    return g;
  }

  bool contains(const Point2& x, double tol = 0.0) const { return level(x) <= tol; }
  bool interior(const Point2& x) const { return level(x) < 0.0; }

  /// Smallest t in (0, tmax] with x + t dir on the boundary, for interior x.
  std::optional<double> ray_exit(const Point2& x, const Vec2& dir, double tmax) const {
    if (level(x + tmax * dir) <= 0.0) return std::nullopt;
    if (auto* s = std::get_if<DiskShape>(&shape_)) {
      const Vec2 r = x - s->c;
      const double A = dot(dir, dir), B = dot(r, dir), C = dot(r, r) - s->r * s->r;
      return (-B + std::sqrt(std::max(0.0, B * B - A * C))) / A;
    }
    double lo = 0.0, hi = tmax;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (lo + hi);
      if (m == lo || m == hi) break;
      (level(x + m * dir) <= 0.0 ? lo : hi) = m;
    }
    return lo;
  }

  Point2 bbox_lo() const {
    if (auto* s = std::get_if<DiskShape>(&shape_)) return {s->c.x - s->r, s->c.y - s->r};
    const auto& s = std::get<ProfileShape>(shape_);
    Point2 lo{s.a, 0.0};
    for (const auto& p : s.cap) lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    lo.y = std::min(lo.y, min_profile_value());
    return lo;
  }
  Point2 bbox_hi() const {
    if (auto* s = std::get_if<DiskShape>(&shape_)) return {s->c.x + s->r, s->c.y + s->r};
    const auto& s = std::get<ProfileShape>(shape_);
    Point2 hi{s.b, 0.0};
    for (const auto& p : s.cap) hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    return hi;
  }
  double diameter() const { return norm(bbox_hi() - bbox_lo()); }

  /// Counterclockwise boundary samples. Profile domains: the lower profile is
  /// graded toward x1 = 0 with the given ratio, the cap is uniform.
  std::vector<BoundarySample> boundary_samples(int count, double grading = 1.2, double floor_fraction = 1e-2) const {
    if (count < 8) throw ParameterError("boundary_samples: need at least 8 samples");
    std::vector<BoundarySample> out;
    if (auto* s = std::get_if<DiskShape>(&shape_)) {
      for (int i = 0; i < count; ++i) {
        const double t = -0.5 * std::numbers::pi + 2.0 * std::numbers::pi * i / count;
        out.push_back({{s->c.x + s->r * std::cos(t), s->c.y + s->r * std::sin(t)}, false});
      }
      return out;
    }
    const auto& s = std::get<ProfileShape>(shape_);
    const double prof_len = profile_length(s);
    double cap_len = 0.0;
    for (std::size_t i = 0; i + 1 < s.cap.size(); ++i) cap_len += norm(s.cap[i + 1] - s.cap[i]);
    const int n_prof = std::max(5, static_cast<int>(std::round(count * prof_len / (prof_len + cap_len))));
    const int n_cap = std::max(2, count - n_prof);
    // split profile samples between the two sides in proportion to |a|, b
    int n_left = std::max(2, static_cast<int>(std::round(n_prof * (-s.a) / (s.b - s.a))) + 1);
    if (-s.a == s.b) n_left = n_prof / 2 + 1;
    const int n_right = std::max(2, n_prof - n_left + 2);
    const auto left = graded_points(-s.a, n_left, grading, floor_fraction);
    const auto right = graded_points(s.b, n_right, grading, floor_fraction);
    for (std::size_t i = left.size(); i-- > 1;) {
      const double x1 = (i + 1 == left.size()) ? s.a : -left[i];
      out.push_back({{x1, s.profile(x1)}, true});
    }
    out.push_back({{0.0, s.profile(0.0)}, true});
    for (std::size_t i = 1; i < right.size(); ++i) {
      const double x1 = (i + 1 == right.size()) ? s.b : right[i];
      out.push_back({{x1, s.profile(x1)}, true});
    }
    // cap samples spread by segment length
    std::vector<double> seg_len;
    for (std::size_t i = 0; i + 1 < s.cap.size(); ++i) seg_len.push_back(norm(s.cap[i + 1] - s.cap[i]));
    for (std::size_t i = 0; i + 1 < s.cap.size(); ++i) {
      const int m = std::max(1, static_cast<int>(std::round(n_cap * seg_len[i] / cap_len)));
      for (int j = (i == 0 ? 1 : 0); j < m; ++j) {
        const double t = static_cast<double>(j) / m;
        const Point2 p = s.cap[i] + t * (s.cap[i + 1] - s.cap[i]);
        out.push_back({p, false});
      }
    }
    return out;
  }

  /// Unit tangent (counterclockwise) at a boundary point.
  Vec2 tangent(const Point2& p) const { return -perp(inner_normal(p)); }

  /// Unit inner normal at a boundary point.
  Vec2 inner_normal(const Point2& p) const {
    if (auto* s = std::get_if<DiskShape>(&shape_)) return normalized(s->c - p);
    const auto& s = std::get<ProfileShape>(shape_);
    double best = std::abs(s.profile.extended(p.x) - p.y);
    Vec2 n = normalized(Vec2{-s.profile.function().derivative(std::clamp(p.x, s.a, s.b), 1), 1.0});
    for (std::size_t i = 0; i + 1 < s.cap.size(); ++i) {
      const Vec2 e = s.cap[i + 1] - s.cap[i];
      const double dist = std::abs(cross(e, p - s.cap[i])) / norm(e);
      if (dist < best) {
        best = dist;
        n = normalized(perp(e));
      }
    }
    return n;
  }

  /// Every sampled boundary vertex is a vertex of the convex hull of the samples
  /// (up to collinearity along straight pieces).
  bool boundary_is_convex(const std::vector<BoundarySample>& samples, double tol = 1e-12) const {
    const std::size_t n = samples.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = samples[(i + n - 1) % n].p;
      const Point2& b = samples[i].p;
      const Point2& c = samples[(i + 1) % n].p;
      const double scale = norm(b - a) * norm(c - b);
      if (cross(b - a, c - b) < -tol * std::max(scale, 1e-300)) return false;
    }
    return true;
  }

 private:
  struct ProfileShape {
    BoundaryProfile profile;
    double a, b;
    std::vector<Point2> cap;
  };
  struct DiskShape {
    Point2 c;
    double r;
  };

  static double root_on_side(const BoundaryProfile& p, double end, double height) {
    if (p(end) < height) throw DomainError("Domain2D::strip: profile does not reach the cap inside its window");
    double lo = 0.0, hi = end;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (lo + hi);
      if (m == lo || m == hi) break;
      (p(m) < height ? lo : hi) = m;
    }
    // prefer the endpoint that lands exactly on the cap
    return (p(hi) == height || std::abs(p(hi) - height) <= std::abs(p(lo) - height)) ? hi : lo;
  }

  static double profile_length(const ProfileShape& s) {
    double len = 0.0;
    Point2 prev{s.a, s.profile(s.a)};
    for (int i = 1; i <= 512; ++i) {
      const double x = s.a + (s.b - s.a) * i / 512;
      const Point2 q{x, s.profile(x)};
      len += norm(q - prev);
      prev = q;
    }
    return len;
  }

  double min_profile_value() const {
    const auto& s = std::get<ProfileShape>(shape_);
    double m = kInf;
    for (int i = 0; i <= 256; ++i) m = std::min(m, s.profile(s.a + (s.b - s.a) * i / 256));
    return m;
  }

  std::variant<ProfileShape, DiskShape> shape_;
};

}  // namespace malab
