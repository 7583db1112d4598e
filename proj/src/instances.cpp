#include "portalgon/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace portalgon::instances {

namespace {

Fragment make_fragment(int id, std::vector<Point> pts) {
  Fragment f;
  f.id = id;
  f.vertices = std::move(pts);
  return f;
}

}  // namespace

Portalgon flat_torus() {
  // ccw: e0 bottom, e1 right, e2 top, e3 left.
  Fragment f = make_fragment(0, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Portal vertical;   // (0,t) == (1,t)
  vertical.half[0] = {0, 3, true};
  vertical.half[1] = {0, 1, false};
  Portal horizontal;  // (t,0) == (t,1)
  horizontal.half[0] = {0, 0, false};
  horizontal.half[1] = {0, 2, true};
  return Portalgon({f}, {vertical, horizontal});
}

Portalgon cylinder(double width, double height) {
  Fragment f = make_fragment(
      0, {{0, 0}, {width, 0}, {width, height}, {0, height}});
  Portal vertical;
  vertical.half[0] = {0, 3, true};
  vertical.half[1] = {0, 1, false};
  return Portalgon({f}, {vertical});
}

Portalgon mobius() {
  Fragment f = make_fragment(0, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  Portal band;  // (0,t) == (1,1-t)
  band.half[0] = {0, 3, true};  // directed (0,0)->(0,1)
  band.half[1] = {0, 1, true};  // directed (1,1)->(1,0)
  return Portalgon({f}, {band});
}

Portalgon bottomless_pyramid() {
  double apex_y = std::sqrt(3.0);
  std::vector<Fragment> frags;
  for (int i = 0; i < 4; ++i)
    frags.push_back(make_fragment(i, {{-1, 0}, {1, 0}, {0, apex_y}}));
  std::vector<Portal> portals;
  for (int i = 0; i < 4; ++i) {
    Portal p;
    p.half[0] = {i, 1, false};           // (1,0) -> apex
    p.half[1] = {(i + 1) % 4, 2, true};  // (-1,0) -> apex
    portals.push_back(p);
  }
  return Portalgon(frags, portals);
}

namespace {
// Spiral strip parameters: unit shift and height, width tuned so the
// canonical witness pair winds `windings` times.
struct SpiralParams {
  double w;
  double shift = 1.0;
  double height = 1.0;
};
SpiralParams spiral_params(int windings) { return {2.0 * windings + 2.0}; }
}  // namespace

Portalgon spiral(int windings) {
  SpiralParams sp = spiral_params(windings);
  // Parallelogram: bottom (0,0)->(w,0), top (w+d,h)->(d,h) in ccw order.
  Fragment f = make_fragment(0, {{0, 0},
                                 {sp.w, 0},
                                 {sp.w + sp.shift, sp.height},
                                 {sp.shift, sp.height}});
  Portal p;  // (x,0) == (x+shift, height)
  p.half[0] = {0, 0, false};
  p.half[1] = {0, 2, true};
  return Portalgon({f}, {p});
}

SurfacePoint spiral_witness_s(int windings) {
  SpiralParams sp = spiral_params(windings);
  return {0, {sp.w - 1.0 + sp.shift * 0.5, sp.height * 0.5}, {}};
}

SurfacePoint spiral_witness_t(int windings) {
  SpiralParams sp = spiral_params(windings);
  return {0, {1.0 + sp.shift * 0.5, sp.height * 0.5}, {}};
}

namespace {
struct LowerboundParams {
  int m;
  double slab_w = 1.0;
  double drift;   // shift of the bottom-top gluing
  double height;  // = drift
};
LowerboundParams lowerbound_params(int slabs, int windings) {
  LowerboundParams lp;
  lp.m = slabs;
  lp.drift = (slabs * lp.slab_w - 0.5) / (2.0 * windings);
  lp.height = lp.drift;
  return lp;
}
}  // namespace

Portalgon lowerbound_family(int slabs, int windings) {
  LowerboundParams lp = lowerbound_params(slabs, windings);
  double w = lp.slab_w, d = lp.drift, h = lp.height;
  if (d >= w)
    fail(ErrorKind::InvalidPortalgon,
         "lowerbound_family: drift must stay below the slab width");
  std::vector<Fragment> frags;
  for (int i = 0; i < slabs; ++i) {
    double a = i * w, b = (i + 1) * w;
    // e0 (a,0)->(b-d,0), e1 ..->(b,0), e2 right, e3 (b,h)->(a+d,h),
    // e4 ..->(a,h), e5 left.
    frags.push_back(make_fragment(i, {{a, 0},
                                      {b - d, 0},
                                      {b, 0},
                                      {b, h},
                                      {a + d, h},
                                      {a, h}}));
  }
  std::vector<Portal> portals;
  for (int i = 0; i + 1 < slabs; ++i) {
    Portal blue;  // slab i right == slab i+1 left
    blue.half[0] = {i, 2, false};
    blue.half[1] = {i + 1, 5, true};
    portals.push_back(blue);
  }
  for (int i = 0; i < slabs; ++i) {
    Portal red;  // (x,0) == (x+d,h) within slab i
    red.half[0] = {i, 0, false};
    red.half[1] = {i, 3, true};
    portals.push_back(red);
  }
  for (int i = 0; i + 1 < slabs; ++i) {
    Portal red_x;  // (x,0) near the right end of slab i == start of top i+1
    red_x.half[0] = {i, 1, false};
    red_x.half[1] = {i + 1, 4, true};
    portals.push_back(red_x);
  }
  return Portalgon(frags, portals);
}

SurfacePoint lowerbound_witness_s(int slabs, int windings) {
  LowerboundParams lp = lowerbound_params(slabs, windings);
  return {slabs - 1, {slabs * lp.slab_w - 0.25, lp.height / 2.0}, {}};
}

SurfacePoint lowerbound_witness_t(int slabs, int windings) {
  LowerboundParams lp = lowerbound_params(slabs, windings);
  return {0, {0.25, lp.height / 2.0}, {}};
}

Portalgon angle_wedge(double alpha, double near_touch) {
  // Horizontal portal edge from (0,0) to (L,0); the other portal edge rises
  // at angle alpha, starting near the right end of the horizontal one.
  double L = 2.0;
  Point s{L + near_touch, near_touch};
  Point dir{std::cos(alpha), std::sin(alpha)};
  Point e = s + L * dir;
  Fragment f = make_fragment(0, {{0, 0}, {L, 0}, s, e});
  Portal p;  // (0,0)==e, (L,0)==s: orientation-preserving wedge gluing
  p.half[0] = {0, 0, false};  // (0,0)->(L,0)
  p.half[1] = {0, 2, true};   // directed e->s
  return Portalgon({f}, {p});
}

Portalgon parallelogram(double width, double height, double shift) {
  Fragment f = make_fragment(
      0, {{0, 0}, {width, 0}, {width + shift, height}, {shift, height}});
  Portal p;
  p.half[0] = {0, 0, false};
  p.half[1] = {0, 2, true};
  return Portalgon({f}, {p});
}

Portalgon three_fragment_ring(double drift) {
  // Parallelograms with vertical portal sides; the ring accumulates drift.
  double w = 1.0, h = 1.0;
  std::vector<Fragment> frags;
  for (int i = 0; i < 3; ++i)
    frags.push_back(make_fragment(
        i, {{0, 0}, {w, drift}, {w, drift + h}, {0, h}}));
  std::vector<Portal> portals;
  for (int i = 0; i < 3; ++i) {
    Portal p;  // right side of i == left side of i+1
    p.half[0] = {i, 1, false};           // (w,drift)->(w,drift+h)
    p.half[1] = {(i + 1) % 3, 3, true};  // (0,0)->(0,h)
    portals.push_back(p);
  }
  return Portalgon(frags, portals);
}

Portalgon four_fragments_five_portals() {
  std::vector<Fragment> frags;
  for (int i = 0; i < 4; ++i)
    frags.push_back(make_fragment(i, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  auto portal = [](int fa, int ea, bool ra, int fb, int eb, bool rb) {
    Portal p;
    p.half[0] = {fa, ea, ra};
    p.half[1] = {fb, eb, rb};
    return p;
  };
  std::vector<Portal> portals = {
      portal(0, 1, false, 1, 3, true),  // A right - B left
      portal(1, 1, false, 2, 3, true),  // B right - C left
      portal(2, 2, true, 0, 0, false),  // C top - A bottom
      portal(0, 2, true, 3, 0, false),  // A top - D bottom
      portal(1, 2, true, 3, 2, true),   // B top - D top
  };
  return Portalgon(frags, portals);
}

Portalgon random_disk_triangulation(int sides, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(0.7, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < sides; ++i) {
    double a = 2.0 * M_PI * i / sides;
    double r = jitter(rng);
    pts.push_back({r * std::cos(a), r * std::sin(a)});
  }
  Portalgon poly({make_fragment(0, pts)}, {});
  return triangulate(poly).portalgon;
}

Portalgon leafy_tree() {
  std::vector<Fragment> frags = {
      make_fragment(0, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}),
      make_fragment(1, {{0, 0}, {1, 0}, {1, 1}, {0, 1}}),
      make_fragment(2, {{0, 0}, {1, 0}, {0.5, 1}}),
  };
  auto portal = [](int fa, int ea, bool ra, int fb, int eb, bool rb) {
    Portal p;
    p.half[0] = {fa, ea, ra};
    p.half[1] = {fb, eb, rb};
    return p;
  };
  std::vector<Portal> portals = {
      portal(0, 1, false, 1, 3, true),  // root right - leaf1 left
      portal(0, 2, true, 2, 0, false),  // root top - leaf2 bottom
  };
  return Portalgon(frags, portals);
}

namespace closed_form {

double torus_distance(Point s, Point t) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      best = std::min(best, dist({t.x + i, t.y + j}, s));
  return best;
}

double cylinder_distance(double width, Point s, Point t) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = -2; i <= 2; ++i)
    best = std::min(best, dist({t.x + i * width, t.y}, s));
  return best;
}

double spiral_distance(int windings, Point s, Point t) {
  SpiralParams sp = spiral_params(windings);
  double best = std::numeric_limits<double>::infinity();
  long k_max = 4L * windings + 8;
  for (long k = -k_max; k <= k_max; ++k)
    best = std::min(
        best, dist({t.x + k * sp.shift, t.y + k * sp.height}, s));
  return best;
}

}  // namespace closed_form

}  // namespace portalgon::instances
