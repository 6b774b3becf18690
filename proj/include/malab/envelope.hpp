#pragma once

// Piecewise-affine convex functions from lower hulls of lifted samples: the
// homogeneous Dirichlet solution (hull of the lifted boundary graph) and the
// convex envelope of an obstacle (hull of lifted interior + boundary samples).

#include <malab/core.hpp>
#include <malab/domain.hpp>
#include <malab/hull3d.hpp>

#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

namespace malab {

struct LiftedVertex {
  Point2 p;
  double value = 0.0;
  bool on_boundary = false;
};

class PiecewiseAffineConvexFunction {
 public:
  PiecewiseAffineConvexFunction(std::vector<LiftedVertex> samples, std::uint64_t seed = 0x5eed)
      : samples_(std::move(samples)) {
    std::vector<Point2> xy;
    std::vector<double> z;
    for (const auto& s : samples_) {
      xy.push_back(s.p);
      z.push_back(s.value);
    }
    faces_ = lower_hull(xy, z, seed);
    if (faces_.empty()) throw GeometryError("PiecewiseAffineConvexFunction: empty lower hull");
    is_vertex_.assign(samples_.size(), false);
    for (const auto& t : faces_)
      for (int v : t.v) is_vertex_[v] = true;
    planes_.reserve(faces_.size());
    for (const auto& t : faces_) {
      planes_.push_back(plane_through(t));
      const Point2 &a = samples_[t.v[0]].p, &b = samples_[t.v[1]].p, &c = samples_[t.v[2]].p;
      const double e2 = std::max({dot(b - a, b - a), dot(c - b, c - b), dot(a - c, a - c)});
      quality_.push_back(std::abs(cross(b - a, c - a)) / e2);
    }
    build_buckets();
  }

  const std::vector<LiftedVertex>& samples() const { return samples_; }
  const std::vector<Triangle>& faces() const { return faces_; }
  const std::vector<AffinePlane>& planes() const { return planes_; }
  bool is_hull_vertex(std::size_t i) const { return is_vertex_[i]; }

  double value_range() const {
    double lo = kInf, hi = -kInf;
    for (const auto& s : samples_) {
      lo = std::min(lo, s.value);
      hi = std::max(hi, s.value);
    }
    return hi - lo;
  }

  /// Index of a face whose projection contains x (with a small relative
  /// tolerance); nullopt outside. Containing faces agree on the value, so the
  /// best-shaped one is taken: near-collinear slivers have huge gradients.
  std::optional<std::size_t> locate(const Point2& x) const {
    std::optional<std::size_t> best;
    for (int fi : bucket(x)) {
      if (!contains(faces_[fi], x)) continue;
      if (!best || quality_[fi] > quality_[*best]) best = fi;
    }
    return best;
  }

  /// Hull value; outside the sampled polygon the convex extension (max of all
  /// face planes) is used.
  double operator()(const Point2& x) const {
    if (auto f = locate(x)) return planes_[*f](x);
    return max_plane(x);
  }

  /// Gradient of the face at x (subgradient at edges and vertices).
  Vec2 gradient(const Point2& x) const {
    if (auto f = locate(x)) return planes_[*f].gradient;
    return planes_[argmax_plane(x)].gradient;
  }

  double max_plane(const Point2& x) const { return planes_[argmax_plane(x)](x); }

  std::size_t argmax_plane(const Point2& x) const {
    std::size_t best = 0;
    double v = -kInf;
    for (std::size_t i = 0; i < planes_.size(); ++i) {
      const double w = planes_[i](x);
      if (w > v) {
        v = w;
        best = i;
      }
    }
    return best;
  }

  /// Largest gradient magnitude over faces.
  double max_gradient_norm() const {
    double m = 0.0;
    for (const auto& pl : planes_) m = std::max(m, norm(pl.gradient));
    return m;
  }

  /// Faces incident to sample vertex i.
  std::vector<std::size_t> fan(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < faces_.size(); ++f)
      for (int v : faces_[f].v)
        if (static_cast<std::size_t>(v) == i) out.push_back(f);
    return out;
  }

  void write_off(std::ostream& os) const {
    char buf[128];
    os << "OFF\n" << samples_.size() << ' ' << faces_.size() << " 0\n";
    for (const auto& s : samples_) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", s.p.x, s.p.y, s.value);
      os << buf;
    }
    for (const auto& t : faces_) os << "3 " << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << '\n';
  }

  void write_csv(std::ostream& os, const std::vector<Point2>& points) const {
    char buf[128];
    os << "x1,x2,u,u1,u2\n";
    for (const auto& p : points) {
      const Vec2 g = gradient(p);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.x, p.y, (*this)(p), g.x, g.y);
      os << buf;
    }
  }

 private:
  AffinePlane plane_through(const Triangle& t) const {
    const auto &a = samples_[t.v[0]], &b = samples_[t.v[1]], &c = samples_[t.v[2]];
    const Vec2 e1 = b.p - a.p, e2 = c.p - a.p;
    const double d = cross(e1, e2);
    const double dz1 = b.value - a.value, dz2 = c.value - a.value;
    const Vec2 g{(dz1 * e2.y - dz2 * e1.y) / d, (dz2 * e1.x - dz1 * e2.x) / d};
    return {a.p, a.value, g};
  }

  bool contains(const Triangle& t, const Point2& x) const {
    const Point2 &a = samples_[t.v[0]].p, &b = samples_[t.v[1]].p, &c = samples_[t.v[2]].p;
    const double area = cross(b - a, c - a);
    const double slack = -1e-12 * area;
    return cross(b - a, x - a) >= slack && cross(c - b, x - b) >= slack && cross(a - c, x - c) >= slack;
  }

  void build_buckets() {
    lo_ = {kInf, kInf};
    Point2 hi{-kInf, -kInf};
    for (const auto& s : samples_) {
      lo_ = {std::min(lo_.x, s.p.x), std::min(lo_.y, s.p.y)};
      hi = {std::max(hi.x, s.p.x), std::max(hi.y, s.p.y)};
    }
    const int g = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(faces_.size()))), 1, 256);
    nx_ = ny_ = g;
    cell_ = {std::max((hi.x - lo_.x) / g, 1e-300), std::max((hi.y - lo_.y) / g, 1e-300)};
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      Point2 a{kInf, kInf}, b{-kInf, -kInf};
      for (int v : faces_[f].v) {
        a = {std::min(a.x, samples_[v].p.x), std::min(a.y, samples_[v].p.y)};
        b = {std::max(b.x, samples_[v].p.x), std::max(b.y, samples_[v].p.y)};
      }
      const auto [i0, j0] = cell_of(a);
      const auto [i1, j1] = cell_of(b);
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(f));
    }
  }

  std::pair<int, int> cell_of(const Point2& x) const {
    const int i = std::clamp(static_cast<int>(std::floor((x.x - lo_.x) / cell_.x)), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((x.y - lo_.y) / cell_.y)), 0, ny_ - 1);
    return {i, j};
  }

  const std::vector<int>& bucket(const Point2& x) const {
    const auto [i, j] = cell_of(x);
    return buckets_[static_cast<std::size_t>(j) * nx_ + i];
  }

  std::vector<LiftedVertex> samples_;
  std::vector<Triangle> faces_;
  std::vector<AffinePlane> planes_;
  std::vector<double> quality_;
  std::vector<bool> is_vertex_;
  Point2 lo_;
  Vec2 cell_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

using BoundaryFunction = std::function<double(const Point2&)>;
using Obstacle = std::function<double(const Point2&)>;

/// Lower hull of the lifted boundary graph.
inline PiecewiseAffineConvexFunction homogeneous_solution(const Domain2D& domain, const BoundaryFunction& phi,
                                                          int boundary_samples, double grading = 1.2) {
  if (boundary_samples < 8) throw ParameterError("homogeneous_solution: need at least 8 boundary samples");
  std::vector<LiftedVertex> lifted;
  for (const auto& s : domain.boundary_samples(boundary_samples, grading)) lifted.push_back({s.p, phi(s.p), true});
  return PiecewiseAffineConvexFunction(std::move(lifted));
}

/// Cartesian interior points strictly inside the domain, about `count` of them.
inline std::vector<Point2> interior_grid(const Domain2D& domain, int count) {
  const Point2 lo = domain.bbox_lo(), hi = domain.bbox_hi();
  const double area = (hi.x - lo.x) * (hi.y - lo.y);
  std::vector<Point2> pts;
  for (double fill = 1.0; fill < 64.0 && static_cast<int>(pts.size()) < count; fill *= 1.5) {
    pts.clear();
    const double step = std::sqrt(area / (count * fill));
    const int nx = std::max(1, static_cast<int>((hi.x - lo.x) / step));
    const int ny = std::max(1, static_cast<int>((hi.y - lo.y) / step));
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const Point2 p{lo.x + (hi.x - lo.x) * (i + 0.5) / nx, lo.y + (hi.y - lo.y) * (j + 0.5) / ny};
        if (domain.interior(p)) pts.push_back(p);
      }
  }
  return pts;
}

/// Lower hull of lifted interior and boundary samples of the obstacle.
inline PiecewiseAffineConvexFunction convex_envelope(const Domain2D& domain, const Obstacle& w, int interior_samples,
                                                     int boundary_samples, double grading = 1.2) {
  std::vector<LiftedVertex> lifted;
  for (const auto& s : domain.boundary_samples(boundary_samples, grading)) lifted.push_back({s.p, w(s.p), true});
  for (const auto& p : interior_grid(domain, interior_samples)) lifted.push_back({p, w(p), false});
  return PiecewiseAffineConvexFunction(std::move(lifted));
}

/// Envelope of arbitrary lifted samples (used for idempotence checks).
inline PiecewiseAffineConvexFunction convex_envelope(std::vector<LiftedVertex> samples) {
  return PiecewiseAffineConvexFunction(std::move(samples));
}

struct ContactSet {
  Point2 base;
  AffinePlane support;
  std::vector<std::size_t> vertices;  // sample indices with u = support within tol
  std::vector<std::size_t> touching_reference;
  std::vector<Point2> extreme_points;
  bool singleton = false;
  bool segment = false;  // contact points are collinear
};

/// Support plane at x0: the containing face, or at a hull vertex the mean of
/// the fan gradients (a subgradient by convexity of the subdifferential).
inline AffinePlane support_plane(const PiecewiseAffineConvexFunction& u, const Point2& x0, double vertex_tol) {
  for (std::size_t i = 0; i < u.samples().size(); ++i) {
    if (!u.is_hull_vertex(i) || norm(u.samples()[i].p - x0) > vertex_tol) continue;
    Vec2 g;
    const auto fan = u.fan(i);
    for (auto f : fan) g += u.planes()[f].gradient;
    g *= 1.0 / static_cast<double>(fan.size());
    return {u.samples()[i].p, u.samples()[i].value, g};
  }
  const auto f = u.locate(x0);
  const std::size_t fi = f ? *f : u.argmax_plane(x0);
  const AffinePlane& pl = u.planes()[fi];
  return {x0, pl(x0), pl.gradient};
}

namespace detail {

// Convex hull of planar points (monotone chain, exact orientation).
inline std::vector<Point2> planar_hull(std::vector<Point2> p) {
  std::sort(p.begin(), p.end(), [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  std::vector<Point2> h(2 * p.size());
  std::size_t k = 0;
  auto turn = [](const Point2& o, const Point2& a, const Point2& b) {
    return predicates::orient2d(o.x, o.y, a.x, a.y, b.x, b.y);
  };
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace detail

/// Contact set {u = l0} of the support plane at x0: the sample vertices
/// reachable from x0 along hull edges whose endpoints both touch l0 (such
/// edges lie in the contact set since u is affine on them). With a reference
/// function, vertices where u equals it are listed separately.
inline ContactSet contact_set(const PiecewiseAffineConvexFunction& u, const Point2& x0, double tol,
                              const Obstacle* reference = nullptr, double vertex_tol = 1e-12) {
  if (!(tol > 0.0)) throw ParameterError("contact_set: tolerance must be positive");
  ContactSet cs;
  cs.base = x0;
  cs.support = support_plane(u, x0, vertex_tol);
  const auto& s = u.samples();
  auto touches = [&](int v) { return std::abs(s[v].value - cs.support(s[v].p)) <= tol; };
  std::vector<std::vector<int>> adj(s.size());
  for (const auto& t : u.faces())
    for (int e = 0; e < 3; ++e) {
      adj[t.v[e]].push_back(t.v[(e + 1) % 3]);
      adj[t.v[(e + 1) % 3]].push_back(t.v[e]);
    }
  std::vector<int> stack;
  bool at_vertex = false;
  for (std::size_t v = 0; v < s.size(); ++v)
    if (u.is_hull_vertex(v) && norm(s[v].p - x0) <= vertex_tol) {
      stack.push_back(static_cast<int>(v));
      at_vertex = true;
    }
  if (!at_vertex) {
    if (const auto f = u.locate(x0))
      for (int v : u.faces()[*f].v)
        if (touches(v)) stack.push_back(v);
  }
  std::vector<char> seen(s.size(), 0);
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    cs.vertices.push_back(static_cast<std::size_t>(v));
    for (int w : adj[v])
      if (!seen[w] && touches(w)) stack.push_back(w);
  }
  std::sort(cs.vertices.begin(), cs.vertices.end());
  if (reference)
    for (auto v : cs.vertices)
      if (std::abs((*reference)(s[v].p) - s[v].value) <= tol) cs.touching_reference.push_back(v);
  std::vector<Point2> pts;
  for (auto v : cs.vertices) pts.push_back(s[v].p);
  if (pts.size() <= 1) {
    cs.singleton = true;
    cs.extreme_points = {x0};
    return cs;
  }
  cs.extreme_points = detail::planar_hull(pts);
  cs.segment = cs.extreme_points.size() == 2;
  return cs;
}

}  // namespace malab
