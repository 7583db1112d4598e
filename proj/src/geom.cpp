#include "portalgon/geom.hpp"

#include <algorithm>

namespace portalgon {

Isometry compose(const Isometry& g, const Isometry& h) {
  Isometry r;
  r.m00 = g.m00 * h.m00 + g.m01 * h.m10;
  r.m01 = g.m00 * h.m01 + g.m01 * h.m11;
  r.m10 = g.m10 * h.m00 + g.m11 * h.m10;
  r.m11 = g.m10 * h.m01 + g.m11 * h.m11;
  r.translation = g.apply(h.translation);
  r.orientation_reversing = g.orientation_reversing != h.orientation_reversing;
  return r;
}

Isometry glue_isometry(const Segment& src, const Segment& dst, bool flip) {
  double ls = src.length();
  double ld = dst.length();
  if (std::abs(ls - ld) > kEpsRel * std::max({1.0, ls, ld}))
    fail(ErrorKind::LengthMismatch,
         "glue_isometry: segment lengths differ beyond tolerance (" +
             std::to_string(ls) + " vs " + std::to_string(ld) + ")");
  if (ls <= 0.0 || ld <= 0.0)
    fail(ErrorKind::Degenerate, "glue_isometry: zero-length segment");

  // Unit direction frames; the flip conjugates with a reflection across the
  // source direction axis.
  Point u = src.dir() / ls;
  Point v = dst.dir() / ld;
  Isometry r;
  if (!flip) {
    // Rotation taking u to v.
    double c = dot(u, v), s = cross(u, v);
    r.m00 = c;
    r.m01 = -s;
    r.m10 = s;
    r.m11 = c;
    r.orientation_reversing = false;
  } else {
    // Reflection across the bisector frame: maps u to v with det -1.
    // Linear part: R(v) * F * R(u)^-1, with F = reflection across x-axis.
    double c = u.x * v.x - u.y * v.y;  // cos(a+b) pattern
    double s = u.y * v.x + u.x * v.y;  // sin(a+b) pattern
    r.m00 = c;
    r.m01 = s;
    r.m10 = s;
    r.m11 = -c;
    r.orientation_reversing = true;
  }
  r.translation = dst.a - r.apply_vector(src.a);
  return r;
}

Circle circumcircle(Point a, Point b, Point c) {
  double det = orient_det(a, b, c);
  double scale = std::max({1.0, norm2(b - a), norm2(c - a), norm2(c - b)});
  if (std::abs(det) <= kEpsDet * scale)
    fail(ErrorKind::Degenerate, "circumcircle: collinear points");
  // Standard perpendicular-bisector solve.
  double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  double ux = (norm2(a) * (b.y - c.y) + norm2(b) * (c.y - a.y) +
               norm2(c) * (a.y - b.y)) /
              d;
  double uy = (norm2(a) * (c.x - b.x) + norm2(b) * (a.x - c.x) +
               norm2(c) * (b.x - a.x)) /
              d;
  Point center{ux, uy};
  return {center, dist(center, a)};
}

std::optional<std::pair<double, double>> line_line(Point p, Point r, Point q,
                                                   Point s) {
  double denom = cross(r, s);
  double scale = std::max(1.0, norm(r) * norm(s));
  if (std::abs(denom) <= kEpsDet * scale) return std::nullopt;
  Point pq = q - p;
  double t = cross(pq, s) / denom;
  double u = cross(pq, r) / denom;
  return std::make_pair(t, u);
}

bool segments_intersect(const Segment& s1, const Segment& s2, double tol) {
  auto hit = line_line(s1.a, s1.dir(), s2.a, s2.dir());
  double l1 = s1.length(), l2 = s2.length();
  if (!hit) {
    // Parallel: overlap iff collinear and ranges touch.
    if (std::abs(cross(s1.dir(), s2.a - s1.a)) > tol * std::max(1.0, l1 * l2))
      return false;
    Point d = s1.dir() / std::max(l1, 1e-300);
    double a0 = 0.0, a1 = l1;
    double b0 = dot(s2.a - s1.a, d), b1 = dot(s2.b - s1.a, d);
    if (b0 > b1) std::swap(b0, b1);
    return b1 >= a0 - tol && b0 <= a1 + tol;
  }
  double tt = tol / std::max(l1, 1e-300);
  double tu = tol / std::max(l2, 1e-300);
  return hit->first >= -tt && hit->first <= 1.0 + tt && hit->second >= -tu &&
         hit->second <= 1.0 + tu;
}

double point_segment_distance(Point p, const Segment& s) {
  Point d = s.dir();
  double len2 = norm2(d);
  if (len2 <= 0.0) return dist(p, s.a);
  double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return dist(p, s.at(t));
}

double polygon_signed_area(const std::vector<Point>& pts) {
  double twice = 0.0;
  size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * twice;
}

bool point_in_polygon(Point p, const std::vector<Point>& poly, double tol) {
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    Segment e{poly[i], poly[(i + 1) % n]};
    if (point_segment_distance(p, e) <= tol) return true;
  }
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    bool cond = (poly[i].y > p.y) != (poly[j].y > p.y);
    if (cond) {
      double xint = poly[j].x + (p.y - poly[j].y) / (poly[i].y - poly[j].y) *
                                    (poly[i].x - poly[j].x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(const std::vector<Point>& poly, double tol) {
  size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    Segment si{poly[i], poly[(i + 1) % n]};
    if (si.length() <= tol) return false;  // zero-length edge
    for (size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      Segment sj{poly[j], poly[(j + 1) % n]};
      if (adjacent) {
        // Shared endpoint allowed; forbid further overlap.
        Point shared = (j == i + 1) ? poly[j] : poly[i];
        Point oi = (j == i + 1) ? poly[i] : poly[(i + 1) % n];
        Point oj = (j == i + 1) ? poly[(j + 1) % n] : poly[j];
        // Collinear fold-back: the far endpoints sit on the same ray.
        double c = cross(oi - shared, oj - shared);
        double scale = std::max(1.0, norm(oi - shared) * norm(oj - shared));
        if (std::abs(c) <= tol * scale && dot(oi - shared, oj - shared) > 0.0)
          return false;
        continue;
      }
      if (segments_intersect(si, sj, tol)) return false;
    }
  }
  return true;
}

}  // namespace portalgon
