#pragma once

// Monotone wide-stencil discretization of det D^2 u = f on a Cartesian grid
// with cut arms at the boundary, and the doubling-constant estimator.
//
// Along a lattice direction v with arm fractions a (forward) and b (backward)
// the second difference is
//   D_v u = 2 / ((a + b)|v|^2 h^2) * ((u+ - u)/a + (u- - u)/b),
// exact for quadratics. The discrete operator is the minimum over orthogonal
// pairs (v, v_perp) of max(D_v u, 0) max(D_vperp u, 0).

#include <malab/core.hpp>
#include <malab/domain.hpp>

#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

namespace malab {

struct FieldSpec {
  std::function<double(const Point2&)> f;
  double f0 = 1.0;
  std::optional<double> doubling_hint;
};

struct SolverOptions {
  int resolution = 64;    // nodes per side of the bounding square
  int stencil_width = 3;  // primitive directions with max(|a|,|b|) <= width
  double tol = -1.0;      // residual tolerance; negative means 1e-8 * max(f0, 1)
  long max_sweeps = 100000;
  double damping = 1.0;   // in (0, 1]; keeps the iteration monotone
  int check_every = 10;
};

/// Primitive lattice directions (a, b) with a > 0, b >= 0, max(a, b) <= width,
/// each followed by its perpendicular (-b, a).
inline std::vector<std::array<int, 2>> stencil_directions(int width) {
  if (width < 1) throw ParameterError("stencil_directions: width must be >= 1");
  std::vector<std::array<int, 2>> dirs;
  for (int a = 1; a <= width; ++a)
    for (int b = 0; b <= width; ++b) {
      if (std::gcd(a, b) != 1) continue;
      dirs.push_back({a, b});
      dirs.push_back({-b, a});
    }
  return dirs;
}

class ScalarField2D {
 public:
  struct Arm {
    int neighbor = -1;  // interior node index, or -1 for a boundary point
    double fraction = 1.0;
    double boundary_value = 0.0;
  };

  int nx() const { return n_; }
  int ny() const { return n_; }
  double spacing() const { return h_; }
  Point2 origin() const { return lo_; }
  Point2 node(int i, int j) const { return {lo_.x + i * h_, lo_.y + j * h_}; }
  Point2 node(int k) const { return node(k % n_, k / n_); }
  bool is_interior(int k) const { return index_[k] >= 0; }
  std::size_t unknowns() const { return grid_of_.size(); }
  const std::vector<int>& interior_nodes() const { return grid_of_; }
  std::size_t directions() const { return dirs_.size(); }
  const std::vector<std::array<int, 2>>& direction_vectors() const { return dirs_; }

  /// Value at grid node k (interior nodes hold unknowns; exterior nodes next
  /// to the domain hold the boundary value where an axis arm exits).
  double node_value(int k) const { return values_[k]; }
  double& node_value(int k) { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

  const Arm& arm(std::size_t unknown, std::size_t dir, int side) const {
    return arms_[(unknown * dirs_.size() + dir) * 2 + (side > 0 ? 0 : 1)];
  }

  /// Second difference of the current values along direction dir at an unknown.
  double second_difference(std::size_t unknown, std::size_t dir) const {
    const double u = values_[grid_of_[unknown]];
    const Arm& fw = arm(unknown, dir, +1);
    const Arm& bw = arm(unknown, dir, -1);
    const double up = fw.neighbor >= 0 ? values_[fw.neighbor] : fw.boundary_value;
    const double um = bw.neighbor >= 0 ? values_[bw.neighbor] : bw.boundary_value;
    const auto& v = dirs_[dir];
    const double len2 = (v[0] * v[0] + v[1] * v[1]) * h_ * h_;
    const double a = fw.fraction, b = bw.fraction;
    return 2.0 / ((a + b) * len2) * ((up - u) / a + (um - u) / b);
  }

  double monge_ampere(std::size_t unknown) const {
    double m = kInf;
    for (std::size_t d = 0; d + 1 < dirs_.size(); d += 2)
      m = std::min(m, std::max(second_difference(unknown, d), 0.0) * std::max(second_difference(unknown, d + 1), 0.0));
    return m;
  }

  /// Bilinear interpolation over the grid cell containing x.
  double operator()(const Point2& x) const {
    const auto [i, j, s, t] = cell(x);
    auto v = [&](int a, int b) { return values_[(j + b) * n_ + (i + a)]; };
    return (1 - s) * (1 - t) * v(0, 0) + s * (1 - t) * v(1, 0) + (1 - s) * t * v(0, 1) + s * t * v(1, 1);
  }

  Vec2 gradient(const Point2& x) const {
    const auto [i, j, s, t] = cell(x);
    auto v = [&](int a, int b) { return values_[(j + b) * n_ + (i + a)]; };
    return {((1 - t) * (v(1, 0) - v(0, 0)) + t * (v(1, 1) - v(0, 1))) / h_,
            ((1 - s) * (v(0, 1) - v(0, 0)) + s * (v(1, 1) - v(1, 0))) / h_};
  }

  /// Gradient at an unknown from the three-point formula on the axis arms.
  Vec2 node_gradient(std::size_t unknown) const {
    auto axis = [&](std::size_t d) {
      const double u = values_[grid_of_[unknown]];
      const Arm& fw = arm(unknown, d, +1);
      const Arm& bw = arm(unknown, d, -1);
      const double up = fw.neighbor >= 0 ? values_[fw.neighbor] : fw.boundary_value;
      const double um = bw.neighbor >= 0 ? values_[bw.neighbor] : bw.boundary_value;
      const double a = fw.fraction * h_, b = bw.fraction * h_;
      return (b * b * (up - u) + a * a * (u - um)) / (a * b * (a + b));
    };
    return {axis(0), axis(1)};
  }

  /// Smallest second difference over all unknowns and directions.
  double min_second_difference() const {
    double m = kInf;
    for (std::size_t k = 0; k < unknowns(); ++k)
      for (std::size_t d = 0; d < dirs_.size(); ++d) m = std::min(m, second_difference(k, d));
    return m;
  }

  void write_csv(std::ostream& os) const {
    char buf[160];
    os << "x1,x2,u,u1,u2\n";
    for (std::size_t k = 0; k < unknowns(); ++k) {
      const Point2 p = node(grid_of_[k]);
      const Vec2 g = node_gradient(k);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.x, p.y, values_[grid_of_[k]], g.x, g.y);
      os << buf;
    }
  }

  /// Grid over the bounding square of the domain with boundary arms set from phi.
  static ScalarField2D build(const Domain2D& domain, const std::function<double(const Point2&)>& phi, int resolution,
                             int stencil_width) {
    if (resolution < 8) throw ParameterError("ScalarField2D: resolution must be >= 8");
    ScalarField2D g;
    const Point2 lo = domain.bbox_lo(), hi = domain.bbox_hi();
    const double side = std::max(hi.x - lo.x, hi.y - lo.y);
    g.n_ = resolution;
    g.h_ = side / (resolution - 1);
    const Point2 mid = 0.5 * (lo + hi);
    g.lo_ = {mid.x - 0.5 * side, mid.y - 0.5 * side};
    g.dirs_ = stencil_directions(stencil_width);
    const int total = g.n_ * g.n_;
    g.index_.assign(total, -1);
    g.values_.assign(total, 0.0);
    const double inset = 1e-12 * side;
    for (int k = 0; k < total; ++k)
      if (domain.level(g.node(k)) < -inset) {
        g.index_[k] = static_cast<int>(g.grid_of_.size());
        g.grid_of_.push_back(k);
      }
    if (g.grid_of_.empty()) throw GeometryError("ScalarField2D: no interior nodes");
    g.arms_.resize(g.grid_of_.size() * g.dirs_.size() * 2);
    for (std::size_t u = 0; u < g.grid_of_.size(); ++u) {
      const int k = g.grid_of_[u];
      const int i = k % g.n_, j = k / g.n_;
      const Point2 x = g.node(k);
      for (std::size_t d = 0; d < g.dirs_.size(); ++d)
        for (int s : {+1, -1}) {
          const int di = s * g.dirs_[d][0], dj = s * g.dirs_[d][1];
          Arm arm;
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && jj >= 0 && ii < g.n_ && jj < g.n_ && g.index_[jj * g.n_ + ii] >= 0) {
            arm.neighbor = jj * g.n_ + ii;
          } else {
            const Vec2 step{di * g.h_, dj * g.h_};
            const auto t = domain.ray_exit(x, step, 1.0);
            arm.fraction = t ? std::max(*t, 1e-12) : 1.0;
            arm.boundary_value = phi(x + arm.fraction * step);
            // ghost value for interpolation at an exterior neighbour
            if (std::abs(di) <= 1 && std::abs(dj) <= 1 && ii >= 0 && jj >= 0 && ii < g.n_ && jj < g.n_)
              g.values_[jj * g.n_ + ii] = arm.boundary_value;
          }
          g.arms_[(u * g.dirs_.size() + d) * 2 + (s > 0 ? 0 : 1)] = arm;
        }
    }
    return g;
  }

 private:
  struct CellPos {
    int i, j;
    double s, t;
  };
  CellPos cell(const Point2& x) const {
    const double fx = (x.x - lo_.x) / h_, fy = (x.y - lo_.y) / h_;
    const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n_ - 2);
    const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, n_ - 2);
    return {i, j, fx - i, fy - j};
  }

  int n_ = 0;
  double h_ = 0.0;
  Point2 lo_;
  std::vector<std::array<int, 2>> dirs_;
  std::vector<int> index_;   // grid node -> unknown or -1
  std::vector<int> grid_of_; // unknown -> grid node
  std::vector<double> values_;
  std::vector<Arm> arms_;
};

struct SolveReport {
  double residual = 0.0;
  long sweeps = 0;
  double min_second_difference = 0.0;
  double step = 0.0;  // largest nodal change in the last sweep
};

namespace detail {

inline double local_update(const ScalarField2D& u, std::size_t unknown, double f) {
  const auto& dirs = u.direction_vectors();
  double best = kInf;
  const double h2 = u.spacing() * u.spacing();
  for (std::size_t d = 0; d + 1 < dirs.size(); d += 2) {
    double coef[2][2];  // (alpha, beta) for D = alpha - beta u
    for (int e = 0; e < 2; ++e) {
      const auto& fw = u.arm(unknown, d + e, +1);
      const auto& bw = u.arm(unknown, d + e, -1);
      const double up = fw.neighbor >= 0 ? u.node_value(fw.neighbor) : fw.boundary_value;
      const double um = bw.neighbor >= 0 ? u.node_value(bw.neighbor) : bw.boundary_value;
      const auto& v = dirs[d + e];
      const double a = fw.fraction, b = bw.fraction;
      const double c = 2.0 / ((a + b) * (v[0] * v[0] + v[1] * v[1]) * h2);
      coef[e][0] = c * (up / a + um / b);
      coef[e][1] = c * (1.0 / a + 1.0 / b);
    }
    const double A = coef[0][0] / coef[0][1], B = coef[1][0] / coef[1][1];
    const double cc = f / (coef[0][1] * coef[1][1]);
    const double diff = A - B;
    // smaller root of (A - u)(B - u) = cc
    const double root = 0.5 * (A + B - std::sqrt(diff * diff + 4.0 * cc));
    best = std::min(best, root);
  }
  return best;
}

}  // namespace detail

/// max over unknowns of |MA_h(u) - f|.
inline double residual(const ScalarField2D& u, const FieldSpec& field) {
  double r = 0.0;
  for (std::size_t k = 0; k < u.unknowns(); ++k) {
    const double fk = field.f(u.node(u.interior_nodes()[k]));
    r = std::max(r, std::abs(u.monge_ampere(k) - fk));
  }
  return r;
}

/// Damped nonlinear Gauss-Seidel from the constant max of the boundary data, a
/// supersolution, so iterates decrease monotonically to the discrete solution.
inline ScalarField2D solve(const Domain2D& domain, const FieldSpec& field,
                           const std::function<double(const Point2&)>& phi, const SolverOptions& opt = {},
                           SolveReport* report = nullptr) {
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ParameterError("solve: damping must lie in (0, 1]");
  ScalarField2D u = ScalarField2D::build(domain, phi, opt.resolution, opt.stencil_width);
  std::vector<double> fv(u.unknowns());
  for (std::size_t k = 0; k < u.unknowns(); ++k) {
    fv[k] = field.f(u.node(u.interior_nodes()[k]));
    if (fv[k] < 0.0 || !std::isfinite(fv[k])) throw ParameterError("solve: f must be finite and nonnegative");
  }
  double top = -kInf;
  for (std::size_t k = 0; k < u.unknowns(); ++k)
    for (std::size_t d = 0; d < u.directions(); ++d)
      for (int s : {+1, -1})
        if (u.arm(k, d, s).neighbor < 0) top = std::max(top, u.arm(k, d, s).boundary_value);
  if (!std::isfinite(top)) top = 0.0;
  for (int k : u.interior_nodes()) u.node_value(k) = top;

  const double tol = opt.tol >= 0.0 ? opt.tol : 1e-8 * std::max(field.f0, 1.0);
  double res = kInf;
  long sweep = 0;
  // the residual alone cannot stop the iteration: where f vanishes any field
  // that is flat in one stencil direction has zero residual, so the sweep
  // must also have reached its fixed point
  double step = kInf;
  for (; sweep < opt.max_sweeps;) {
    step = 0.0;
    for (std::size_t k = 0; k < u.unknowns(); ++k) {
      const int node = u.interior_nodes()[k];
      const double target = detail::local_update(u, k, fv[k]);
      step = std::max(step, std::abs(target - u.node_value(node)));
      u.node_value(node) += opt.damping * (target - u.node_value(node));
    }
    ++sweep;
    if (sweep % opt.check_every == 0) {
      res = 0.0;
      for (std::size_t k = 0; k < u.unknowns(); ++k) res = std::max(res, std::abs(u.monge_ampere(k) - fv[k]));
      if (res <= tol && step <= tol) break;
    }
  }
  if (res > tol || step > tol)
    throw ConvergenceError("solve: residual or fixed-point step above tolerance after the sweep budget",
                           std::max(res, step), sweep);
  if (report) *report = {res, sweep, u.min_second_difference(), step};
  return u;
}

// ---------------------------------------------------------------------------
// doubling estimator

struct ConvexSubset {
  enum class Kind { Triangle, Ellipse } kind = Kind::Triangle;
  std::array<Point2, 3> tri{};  // triangle vertices
  Point2 center;                // ellipse centre
  Vec2 axis1, axis2;            // ellipse semi-axes (orthogonal)

  Point2 centroid() const { return kind == Kind::Triangle ? (1.0 / 3.0) * (tri[0] + tri[1] + tri[2]) : center; }

  /// Dilation by factor s about the centroid.
  ConvexSubset dilated(double s) const {
    ConvexSubset d = *this;
    const Point2 c = centroid();
    for (auto& p : d.tri) p = c + s * (p - c);
    d.axis1 = s * axis1;
    d.axis2 = s * axis2;
    return d;
  }
};

/// Midpoint-type quadrature: centroids of an m x m barycentric subdivision for
/// triangles, polar midpoint cells for ellipses. Exact for constants.
inline double integrate(const std::function<double(const Point2&)>& f, const ConvexSubset& D, int m = 48) {
  double sum = 0.0;
  if (D.kind == ConvexSubset::Kind::Triangle) {
    const Point2 a = D.tri[0];
    const Vec2 e1 = (D.tri[1] - a) * (1.0 / m), e2 = (D.tri[2] - a) * (1.0 / m);
    const double cell = 0.5 * std::abs(cross(e1, e2));
    for (int i = 0; i < m; ++i)
      for (int j = 0; i + j < m; ++j) {
        const Point2 base = a + static_cast<double>(i) * e1 + static_cast<double>(j) * e2;
        sum += f(base + (1.0 / 3.0) * (e1 + e2)) * cell;
        if (i + j + 1 < m) sum += f(base + (2.0 / 3.0) * (e1 + e2)) * cell;
      }
    return sum;
  }
  const double jac = std::abs(cross(D.axis1, D.axis2));
  const int nr = m, nt = 4 * m;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) / nr;
    for (int j = 0; j < nt; ++j) {
      const double t = 2.0 * std::numbers::pi * (j + 0.5) / nt;
      const Point2 p = D.center + (r * std::cos(t)) * D.axis1 + (r * std::sin(t)) * D.axis2;
      sum += f(p) * r * (1.0 / nr) * (2.0 * std::numbers::pi / nt) * jac;
    }
  }
  return sum;
}

/// int_D f / int_{D/2} f; infinite when the half set carries no mass.
inline double doubling_ratio(const std::function<double(const Point2&)>& f, const ConvexSubset& D, int m = 48) {
  const double full = integrate(f, D, m);
  const double half = integrate(f, D.dilated(0.5), m);
  if (half <= 0.0) return full > 0.0 ? kInf : 0.0;
  return full / half;
}

inline ConvexSubset random_convex_subset(const Domain2D& domain, Rng& rng) {
  const Point2 lo = domain.bbox_lo(), hi = domain.bbox_hi();
  auto point = [&] {
    for (;;) {
      const Point2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
      if (domain.interior(p)) return p;
    }
  };
  ConvexSubset D;
  if (rng.uniform() < 0.5) {
    D.kind = ConvexSubset::Kind::Triangle;
    for (;;) {
      D.tri = {point(), point(), point()};
      if (std::abs(cross(D.tri[1] - D.tri[0], D.tri[2] - D.tri[0])) > 1e-6 * domain.diameter() * domain.diameter()) break;
    }
    return D;
  }
  D.kind = ConvexSubset::Kind::Ellipse;
  D.center = point();
  const double ang = rng.uniform(0.0, std::numbers::pi);
  const Vec2 e{std::cos(ang), std::sin(ang)};
  double r1 = rng.uniform(0.05, 0.5) * domain.diameter(), r2 = rng.uniform(0.05, 0.5) * domain.diameter();
  for (int shrink = 0; shrink < 200; ++shrink) {
    D.axis1 = r1 * e;
    D.axis2 = r2 * perp(e);
    bool inside = true;
    for (int j = 0; j < 64 && inside; ++j) {
      const double t = 2.0 * std::numbers::pi * j / 64;
      inside = domain.contains(D.center + std::cos(t) * D.axis1 + std::sin(t) * D.axis2);
    }
    if (inside) break;
    r1 *= 0.8;
    r2 *= 0.8;
  }
  return D;
}

struct DoublingEstimate {
  double max_ratio = 0.0;
  double min_ratio = kInf;
  std::size_t trials = 0;
  bool failure = false;  // some half set carried no mass
};

inline DoublingEstimate doubling_estimate(const FieldSpec& field, const Domain2D& domain, int trials,
                                          std::uint64_t seed = 1, int quadrature = 48) {
  if (trials < 1) throw ParameterError("doubling_estimate: trials must be >= 1");
  Rng rng(seed);
  DoublingEstimate est;
  for (int t = 0; t < trials; ++t) {
    const double r = doubling_ratio(field.f, random_convex_subset(domain, rng), quadrature);
    if (r == 0.0) continue;
    ++est.trials;
    est.max_ratio = std::max(est.max_ratio, r);
    est.min_ratio = std::min(est.min_ratio, r);
    if (!std::isfinite(r)) est.failure = true;
  }
  return est;
}

}  // namespace malab
