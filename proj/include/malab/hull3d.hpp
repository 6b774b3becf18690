#pragma once

// Lower convex hull of lifted planar points (x, y, z) by randomized
// incremental construction with conflict lists. All side tests go through the
// exact orientation predicate, so the combinatorics are consistent for
// degenerate (coplanar, collinear) input.

#include <malab/core.hpp>
#include <malab/predicates.hpp>

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

namespace malab {

struct Triangle {
  std::array<int, 3> v;  // counterclockwise in the (x, y) projection
};

namespace detail {

class IncrementalHull {
 public:
  using P3 = predicates::P3;

  IncrementalHull(std::vector<P3> pts, std::uint64_t seed) : pts_(std::move(pts)) {
    const int n = static_cast<int>(pts_.size());
    if (n < 3) throw GeometryError("hull: need at least three points");
    const auto [i0, i1, i2] = initial_triangle();
    // auxiliary apex above the centroid of a large projected triangle
    double zmin = kInf, zmax = -kInf;
    for (const auto& p : pts_) {
      zmin = std::min(zmin, p.z);
      zmax = std::max(zmax, p.z);
    }
    const P3 apex{(pts_[i0].x + pts_[i1].x + pts_[i2].x) / 3.0, (pts_[i0].y + pts_[i1].y + pts_[i2].y) / 3.0,
                  zmax + 1.0 + 4.0 * (zmax - zmin)};
    apex_ = n;
    pts_.push_back(apex);
    point_conflicts_.assign(pts_.size(), {});
    stamp_.assign(pts_.size(), 0);
    build_tetrahedron(i0, i1, i2, apex_);

    std::vector<int> order;
    for (int i = 0; i < n; ++i)
      if (i != i0 && i != i1 && i != i2) order.push_back(i);
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    for (int p : order) assign_initial(p);
    for (int p : order) insert(p);
  }

  /// Faces of the lower hull: not touching the apex, outward normal pointing
  /// down. Returned counterclockwise in projection.
  std::vector<Triangle> lower_faces() const {
    std::vector<Triangle> out;
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      if (f.v[0] == apex_ || f.v[1] == apex_ || f.v[2] == apex_) continue;
      const auto &a = pts_[f.v[0]], &b = pts_[f.v[1]], &c = pts_[f.v[2]];
      const int o = predicates::orient2d(a.x, a.y, b.x, b.y, c.x, c.y);
      // outward normal points down exactly when the projection is clockwise
      if (o < 0) out.push_back({{f.v[0], f.v[2], f.v[1]}});
    }
    return out;
  }

 private:
  struct Face {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbour across edge v[i] -> v[i+1]
    std::vector<int> conflicts;
    bool alive = true;
  };

  // true when p lies strictly on the outer side of face f
  bool visible(const Face& f, int p) const {
    return predicates::orient3d(pts_[f.v[0]], pts_[f.v[1]], pts_[f.v[2]], pts_[p]) < 0;
  }

  std::array<int, 3> initial_triangle() const {
    const int n = static_cast<int>(pts_.size());
    int a = 0;
    for (int i = 1; i < n; ++i)
      if (pts_[i].x < pts_[a].x || (pts_[i].x == pts_[a].x && pts_[i].y < pts_[a].y)) a = i;
    auto d2 = [&](int i, int j) {
      const double dx = pts_[i].x - pts_[j].x, dy = pts_[i].y - pts_[j].y;
      return dx * dx + dy * dy;
    };
    int b = a;
    for (int i = 0; i < n; ++i)
      if (d2(i, a) > d2(b, a)) b = i;
    if (b == a) throw GeometryError("hull: all points project to one location");
    int c = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double area = std::abs((pts_[b].x - pts_[a].x) * (pts_[i].y - pts_[a].y) -
                                   (pts_[b].y - pts_[a].y) * (pts_[i].x - pts_[a].x));
      if (area > best && predicates::orient2d(pts_[a].x, pts_[a].y, pts_[b].x, pts_[b].y, pts_[i].x, pts_[i].y) != 0) {
        best = area;
        c = i;
      }
    }
    if (c < 0) {
      // the float area may underflow for nearly collinear sets; fall back to the exact test
      for (int i = 0; i < n && c < 0; ++i)
        if (predicates::orient2d(pts_[a].x, pts_[a].y, pts_[b].x, pts_[b].y, pts_[i].x, pts_[i].y) != 0) c = i;
    }
    if (c < 0) throw GeometryError("hull: projected points are collinear");
    return {a, b, c};
  }

  int add_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.nb = {-1, -1, -1};
    faces_.push_back(std::move(f));
    return static_cast<int>(faces_.size()) - 1;
  }

  void build_tetrahedron(int p0, int p1, int p2, int p3) {
    if (predicates::orient3d(pts_[p0], pts_[p1], pts_[p2], pts_[p3]) < 0) std::swap(p1, p2);
    const int f0 = add_face(p0, p1, p2), f1 = add_face(p0, p3, p1), f2 = add_face(p1, p3, p2), f3 = add_face(p0, p2, p3);
    const int ids[4] = {f0, f1, f2, f3};
    for (int fi : ids)
      for (int e = 0; e < 3; ++e) {
        const int u = faces_[fi].v[e], w = faces_[fi].v[(e + 1) % 3];
        for (int gj : ids) {
          if (gj == fi) continue;
          for (int g = 0; g < 3; ++g)
            if (faces_[gj].v[g] == w && faces_[gj].v[(g + 1) % 3] == u) faces_[fi].nb[e] = gj;
        }
      }
  }

  void assign_initial(int p) {
    for (int fi = 0; fi < 4; ++fi)
      if (visible(faces_[fi], p)) {
        faces_[fi].conflicts.push_back(p);
        point_conflicts_[p].push_back(fi);
      }
  }

  void insert(int p) {
    std::vector<int> vis;
    for (int fi : point_conflicts_[p])
      if (faces_[fi].alive) vis.push_back(fi);
    point_conflicts_[p].clear();
    point_conflicts_[p].shrink_to_fit();
    if (vis.empty()) return;  // inside or on the current hull
    ++epoch_;
    for (int fi : vis) face_mark_(fi) = epoch_;

    struct HorizonEdge {
      int u, w, outside, from;
    };
    std::vector<HorizonEdge> horizon;
    for (int fi : vis)
      for (int e = 0; e < 3; ++e) {
        const int g = faces_[fi].nb[e];
        if (face_mark_(g) != epoch_) horizon.push_back({faces_[fi].v[e], faces_[fi].v[(e + 1) % 3], g, fi});
      }

    // new faces (u, w, p); link around p through the horizon endpoints
    starts_.resize(pts_.size(), -1);
    ends_.resize(pts_.size(), -1);
    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& h : horizon) {
      const int nf = add_face(h.u, h.w, p);
      created.push_back(nf);
      faces_[nf].nb[0] = h.outside;
      Face& out = faces_[h.outside];
      for (int g = 0; g < 3; ++g)
        if (out.v[g] == h.w && out.v[(g + 1) % 3] == h.u) out.nb[g] = nf;
      starts_[h.u] = nf;
      ends_[h.w] = nf;
    }
    for (int nf : created) {
      Face& f = faces_[nf];
      f.nb[1] = starts_[f.v[1]];  // edge w -> p borders the face starting at w
      f.nb[2] = ends_[f.v[0]];    // edge p -> u borders the face ending at u
    }

    // conflicts of each new face come from the two faces sharing its horizon edge
    for (std::size_t i = 0; i < horizon.size(); ++i) {
      const int nf = created[i];
      ++point_epoch_;
      for (int src : {horizon[i].from, horizon[i].outside})
        for (int q : faces_[src].conflicts) {
          if (q == p || stamp_[q] == point_epoch_) continue;
          stamp_[q] = point_epoch_;
          if (visible(faces_[nf], q)) {
            faces_[nf].conflicts.push_back(q);
            point_conflicts_[q].push_back(nf);
          }
        }
    }
    for (int fi : vis) {
      faces_[fi].alive = false;
      faces_[fi].conflicts.clear();
      faces_[fi].conflicts.shrink_to_fit();
    }
    for (const auto& h : horizon) {
      starts_[h.u] = -1;
      ends_[h.w] = -1;
    }
  }

  long& face_mark_(int fi) {
    if (static_cast<std::size_t>(fi) >= marks_.size()) marks_.resize(faces_.size() * 2 + 16, 0);
    return marks_[fi];
  }

  std::vector<P3> pts_;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> point_conflicts_;
  std::vector<long> marks_;
  std::vector<long> stamp_;
  std::vector<int> starts_, ends_;
  long epoch_ = 0;
  long point_epoch_ = 0;
  int apex_ = -1;
};

}  // namespace detail

/// Lower hull faces of points (xy[i], z[i]).
inline std::vector<Triangle> lower_hull(const std::vector<Point2>& xy, const std::vector<double>& z,
                                        std::uint64_t seed = 0x5eed) {
  if (xy.size() != z.size()) throw ParameterError("lower_hull: size mismatch");
  std::vector<predicates::P3> pts(xy.size());
  for (std::size_t i = 0; i < xy.size(); ++i) {
    if (!std::isfinite(xy[i].x) || !std::isfinite(xy[i].y) || !std::isfinite(z[i]))
      throw GeometryError("lower_hull: non-finite input");
    pts[i] = {xy[i].x, xy[i].y, z[i]};
  }
  return detail::IncrementalHull(std::move(pts), seed).lower_faces();
}

}  // namespace malab
