#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Planar primitives and plane isometries (including orientation-reversing
// ones, which show up when portals glue a surface non-orientably).
//
// Numeric model: 64-bit floating point throughout. Coincidence tests use a
// relative tolerance kEpsRel, degeneracy of sign predicates uses kEpsDet with
// an explicit deadband that is surfaced as an error rather than resolved
// silently.

namespace portalgon {

inline constexpr double kEpsRel = 1e-9;   // coincidence tests, relative
inline constexpr double kEpsDet = 1e-12;  // predicate deadband

enum class ErrorKind {
  LengthMismatch,
  Degenerate,
  InvalidPortalgon,
  NotOnSurface,
  IncoherentSignature,
  EmptyInterval,
  BudgetExceeded,
  NotOnEnvelope,
  NumericalStall,
  NotQuadPortalPair,
  NotSinglePortal,
  NonTerminating,
  UnsupportedTopology,
  NonConvexQuad,
  BoundaryEdge,
  FlipBudgetExceeded,
  DepthCapExceeded,
  SyntaxError,
  SchemaError,
  ValidationError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point p, Point q) { return {p.x + q.x, p.y + q.y}; }
  friend Point operator-(Point p, Point q) { return {p.x - q.x, p.y - q.y}; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend Point operator*(Point p, double s) { return {s * p.x, s * p.y}; }
  friend Point operator/(Point p, double s) { return {p.x / s, p.y / s}; }
  Point operator-() const { return {-x, -y}; }
};

inline double dot(Point p, Point q) { return p.x * q.x + p.y * q.y; }
inline double cross(Point p, Point q) { return p.x * q.y - p.y * q.x; }
inline double norm2(Point p) { return dot(p, p); }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double dist(Point p, Point q) { return norm(p - q); }
inline Point perp(Point p) { return {-p.y, p.x}; }  // ccw quarter turn
inline Point lerp(Point a, Point b, double t) { return a + t * (b - a); }

inline bool almost_equal(double a, double b, double scale) {
  return std::abs(a - b) <= kEpsRel * std::max(1.0, std::abs(scale));
}
inline bool points_close(Point p, Point q, double scale) {
  return dist(p, q) <= kEpsRel * std::max(1.0, std::abs(scale));
}

// Sign of the orientation determinant of (a,b,c); |det| below the deadband
// (scaled by the square of the configuration size) counts as degenerate.
inline double orient_det(Point a, Point b, Point c) {
  return cross(b - a, c - a);
}
inline int orient_sign(Point a, Point b, Point c) {
  double det = orient_det(a, b, c);
  double scale = std::max({1.0, norm2(b - a), norm2(c - a)});
  if (std::abs(det) <= kEpsDet * scale) return 0;
  return det > 0 ? 1 : -1;
}

struct Segment {
  Point a;
  Point b;

  double length() const { return dist(a, b); }
  Point at(double t) const { return lerp(a, b, t); }
  Point dir() const { return b - a; }
};

// Closed parameter interval, used both for [0,1] edge intervals and for
// envelope bookkeeping.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty(double tol = 0.0) const { return hi < lo - tol; }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double t, double tol = 0.0) const {
    return t >= lo - tol && t <= hi + tol;
  }
  Interval clipped(Interval o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }
};

struct Circle {
  Point center;
  double radius = 0.0;
};

// Rigid motion of the plane: p -> linear * p + translation. The linear part
// is orthogonal; det = -1 exactly when orientation_reversing.
struct Isometry {
  // Row-major 2x2: [m00 m01; m10 m11].
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;
  Point translation;
  bool orientation_reversing = false;

  Point apply(Point p) const {
    return {m00 * p.x + m01 * p.y + translation.x,
            m10 * p.x + m11 * p.y + translation.y};
  }
  Point apply_vector(Point v) const {
    return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y};
  }
  Segment apply_segment(Segment s) const { return {apply(s.a), apply(s.b)}; }

  static Isometry identity() { return {}; }

  static Isometry rotation(double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c, -s, s, c, {0.0, 0.0}, false};
  }

  static Isometry translation_by(Point v) {
    return {1.0, 0.0, 0.0, 1.0, v, false};
  }

  double det() const { return m00 * m11 - m01 * m10; }

  bool well_formed() const {
    // Orthogonality within 1e-12 and det consistent with the flag.
    double c00 = m00 * m00 + m10 * m10;
    double c11 = m01 * m01 + m11 * m11;
    double c01 = m00 * m01 + m10 * m11;
    if (std::abs(c00 - 1.0) > 1e-12 || std::abs(c11 - 1.0) > 1e-12 ||
        std::abs(c01) > 1e-12)
      return false;
    double want = orientation_reversing ? -1.0 : 1.0;
    return std::abs(det() - want) <= 1e-12;
  }

  Isometry inverse() const {
    // Orthogonal linear part: inverse = transpose.
    Isometry inv;
    inv.m00 = m00;
    inv.m01 = m10;
    inv.m10 = m01;
    inv.m11 = m11;
    inv.translation = {-(inv.m00 * translation.x + inv.m01 * translation.y),
                       -(inv.m10 * translation.x + inv.m11 * translation.y)};
    inv.orientation_reversing = orientation_reversing;
    return inv;
  }
};

// Applies h first, then g.
Isometry compose(const Isometry& g, const Isometry& h);

// The plane isometry mapping src.a -> dst.a and src.b -> dst.b, reflecting
// iff flip is set. Requires |src| == |dst| up to relative tolerance.
Isometry glue_isometry(const Segment& src, const Segment& dst, bool flip);

// Circumcircle of a non-collinear point triple.
Circle circumcircle(Point a, Point b, Point c);

// Intersection parameter of the supporting lines of (p, p+r) and (q, q+s):
// returns (t, u) with p + t r = q + u s, or nothing if parallel.
std::optional<std::pair<double, double>> line_line(Point p, Point r, Point q,
                                                   Point s);

// Proper or touching intersection test for closed segments.
bool segments_intersect(const Segment& s1, const Segment& s2, double tol);

// Distance from point to closed segment.
double point_segment_distance(Point p, const Segment& s);

// Signed area of a polygon given as a vertex loop.
double polygon_signed_area(const std::vector<Point>& pts);

// Point-in-polygon with boundary counted as inside (tolerance tol on the
// boundary distance).
bool point_in_polygon(Point p, const std::vector<Point>& poly, double tol);

bool polygon_is_simple(const std::vector<Point>& poly, double tol);

}  // namespace portalgon
