#pragma once

// Orientation predicates with a floating-point filter and an exact rational
// fallback. Inputs are doubles, so the rational evaluation is exact.

#include <cmath>

#include <gmpxx.h>

namespace malab::predicates {

struct P3 {
  double x, y, z;
};

namespace detail {

inline constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
inline constexpr double kOrient2Bound = (3.0 + 16.0 * kEps) * kEps;
inline constexpr double kOrient3Bound = (7.0 + 56.0 * kEps) * kEps;

inline int sign(const mpq_class& v) { return sgn(v); }

inline int orient2d_exact(double ax, double ay, double bx, double by, double cx, double cy) {
  const mpq_class acx = mpq_class(ax) - mpq_class(cx), bcx = mpq_class(bx) - mpq_class(cx);
  const mpq_class acy = mpq_class(ay) - mpq_class(cy), bcy = mpq_class(by) - mpq_class(cy);
  return sign(acx * bcy - acy * bcx);
}

inline int orient3d_exact(const P3& a, const P3& b, const P3& c, const P3& d) {
  const mpq_class dx(d.x), dy(d.y), dz(d.z);
  const mpq_class adx = mpq_class(a.x) - dx, ady = mpq_class(a.y) - dy, adz = mpq_class(a.z) - dz;
  const mpq_class bdx = mpq_class(b.x) - dx, bdy = mpq_class(b.y) - dy, bdz = mpq_class(b.z) - dz;
  const mpq_class cdx = mpq_class(c.x) - dx, cdy = mpq_class(c.y) - dy, cdz = mpq_class(c.z) - dz;
  const mpq_class det = adx * (bdy * cdz - bdz * cdy) + bdx * (cdy * adz - cdz * ady) + cdx * (ady * bdz - adz * bdy);
  return sign(det);
}

}  // namespace detail

/// Sign of (a - c) x (b - c): +1 when a, b, c turn counterclockwise.
inline int orient2d(double ax, double ay, double bx, double by, double cx, double cy) {
  const double l = (ax - cx) * (by - cy);
  const double r = (ay - cy) * (bx - cx);
  const double det = l - r;
  const double bound = detail::kOrient2Bound * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient2d_exact(ax, ay, bx, by, cx, cy);
}

/// Sign of det[a - d; b - d; c - d]: +1 when d lies below the plane through
/// a, b, c oriented counterclockwise seen from above (Shewchuk's convention).
inline int orient3d(const P3& a, const P3& b, const P3& c, const P3& d) {
  const double adx = a.x - d.x, ady = a.y - d.y, adz = a.z - d.z;
  const double bdx = b.x - d.x, bdy = b.y - d.y, bdz = b.z - d.z;
  const double cdx = c.x - d.x, cdy = c.y - d.y, cdz = c.z - d.z;
  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                           (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                           (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
  const double bound = detail::kOrient3Bound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient3d_exact(a, b, c, d);
}

}  // namespace malab::predicates
