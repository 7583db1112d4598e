#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "portalgon/instances.hpp"
#include "portalgon/unfold.hpp"

using namespace portalgon;
namespace cf = portalgon::instances::closed_form;

TEST_CASE("thread_gates basics") {
  // No gates: the full edge.
  Interval full = thread_gates({0, 0}, {}, {{2, 0}, {2, 2}});
  CHECK(full.lo == doctest::Approx(0.0));
  CHECK(full.hi == doctest::Approx(1.0));

  // One gate clips to a sub-interval.
  Interval sub =
      thread_gates({0, 0}, {{{1, 0.5}, {1, 1}}}, {{2, 0}, {2, 2}});
  CHECK(sub.lo == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sub.hi == doctest::Approx(1.0).epsilon(1e-6));

  // Gates whose shadows are incompatible give an empty interval.
  Interval bad = thread_gates(
      {0, 0}, {{{1, 0}, {1, 1}}, {{0.5, 3}, {0.6, 3}}}, {{2, 0}, {2, 2}});
  CHECK(bad.empty());
}

TEST_CASE("unfold_along on the flat torus") {
  Portalgon torus = instances::flat_torus();

  Isometry none = unfold_along(torus, {}, 0);
  CHECK(points_close(none.apply({0.3, 0.4}), {0.3, 0.4}, 1.0));

  Signature one{{SignatureElement::crossing(0, 0)}};
  Isometry t1 = unfold_along(torus, one, 0);
  CHECK(points_close(t1.apply({0.0, 0.0}), {1.0, 0.0}, 1.0));
  CHECK(points_close(t1.translation, {1.0, 0.0}, 1.0));

  Signature two{{SignatureElement::crossing(0, 0),
                 SignatureElement::crossing(1, 0)}};
  Isometry t2 = unfold_along(torus, two, 0);
  CHECK(points_close(t2.translation, {1.0, 1.0}, 1.0));

  Signature bad{{SignatureElement::crossing(0, 0)}};
  CHECK_THROWS_AS(unfold_along(torus, bad, 99), Error);
}

TEST_CASE("unfold_along of a signature then its reverse is the identity") {
  Portalgon pyr = instances::bottomless_pyramid();
  std::mt19937 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    // Random crossing walk.
    Signature sig;
    int cur = 0;
    for (int i = 0; i < 6; ++i) {
      std::vector<std::pair<int, int>> options;
      for (size_t pi = 0; pi < pyr.portals().size(); ++pi)
        for (int h = 0; h < 2; ++h)
          if (pyr.portals()[pi].half[h].fragment == cur)
            options.push_back({(int)pi, h});
      auto [pi, h] = options[rng() % options.size()];
      sig.elements.push_back(SignatureElement::crossing(pi, h));
      cur = pyr.portals()[pi].half[1 - h].fragment;
    }
    Signature back;
    for (auto it = sig.elements.rbegin(); it != sig.elements.rend(); ++it)
      back.elements.push_back(SignatureElement::crossing(it->a, 1 - it->b));
    Isometry fwd = unfold_along(pyr, sig, cur);
    Isometry rev = unfold_along(pyr, back, 0);
    Isometry both = compose(rev, fwd);
    Point q{0.2, 0.3};
    CHECK(points_close(both.apply(q), q, 4.0));
  }
}

TEST_CASE("distance_function basics") {
  Fragment tri;
  tri.id = 0;
  tri.vertices = {{0, 0}, {1, 0}, {0, 1}};
  Portalgon p({tri}, {});
  ApexedDistanceFunction f =
      distance_function(p, {}, {0, 1, false}, {0, {0, 0}, {}}, 0.0);
  CHECK(points_close(f.apex, {0, 0}, 1.0));
  CHECK(f.offset == doctest::Approx(0.0));
  CHECK(f.domain.lo == doctest::Approx(0.0));
  CHECK(f.domain.hi == doctest::Approx(1.0));
  CHECK(f.value(0.0) == doctest::Approx(1.0));
  CHECK(f.value(1.0) == doctest::Approx(1.0));
  CHECK(f.min_value() == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("distance_function through the torus seam") {
  Portalgon torus = instances::flat_torus();
  // One crossing out of the left seam: the apex unfolds one unit right.
  Signature sig{{SignatureElement::crossing(0, 0)}};
  ApexedDistanceFunction f = distance_function(
      torus, sig, {0, 3, false}, {0, {0.25, 0.25}, {}}, 0.0);
  CHECK(points_close(f.apex, {1.25, 0.25}, 1.0));

  // Winding six times around a pi/3 wedge turns the unfolded copies through
  // more than a half turn: no straight segment can thread them.
  Portalgon wedge = instances::angle_wedge(M_PI / 3);
  bool threw = false;
  for (int half = 0; half < 2 && !threw; ++half) {
    Signature winding;
    for (int i = 0; i < 6; ++i)
      winding.elements.push_back(SignatureElement::crossing(0, half));
    try {
      distance_function(wedge, winding, {0, 0, false},
                        {0, {1.0, 0.005}, {}}, 0.0);
    } catch (const Error& e) {
      threw = e.kind() == ErrorKind::EmptyInterval;
    }
  }
  CHECK(threw);
}

TEST_CASE("apexed function pairs cross at most twice") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> off(0.0, 2.0);
  Segment edge{{0, 0}, {4, 0}};
  int checked = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    ApexedDistanceFunction f, g;
    f.edge = g.edge = edge;
    f.apex = {pos(rng), pos(rng)};
    g.apex = {pos(rng), pos(rng)};
    f.offset = off(rng);
    g.offset = off(rng);
    f.domain = g.domain = {0.0, 1.0};

    // Dense sampling: count sign changes of f-g.
    int changes = 0;
    double prev = f.value(0.0) - g.value(0.0);
    for (int i = 1; i <= 1000; ++i) {
      double t = i / 1000.0;
      double d = f.value(t) - g.value(t);
      if ((d > 1e-12 && prev < -1e-12) || (d < -1e-12 && prev > 1e-12)) {
        ++changes;
        prev = d;
      } else if (std::abs(d) > 1e-12) {
        prev = d;
      }
    }
    CHECK(changes <= 2);

    // The algebraic roots agree with the sampled sign changes.
    std::vector<double> roots = apexed_intersections(f, g);
    int in_range = 0;
    for (double r : roots)
      if (r > 1e-9 && r < 1.0 - 1e-9) ++in_range;
    CHECK(in_range >= changes);
    ++checked;
  }
  CHECK(checked == 1200);
}

TEST_CASE("oracle: trivial and closed-form cases") {
  Portalgon torus = instances::flat_torus();

  GeodesicPath zero = oracle_shortest_path(torus, {0, {0.3, 0.3}, {}},
                                           {0, {0.3, 0.3}, {}});
  CHECK(zero.length == doctest::Approx(0.0));
  CHECK(zero.signature.elements.empty());

  GeodesicPath diag = oracle_shortest_path(torus, {0, {0.25, 0.25}, {}},
                                           {0, {0.75, 0.75}, {}});
  CHECK(diag.length == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  // Wrap-around is shorter than the direct segment.
  GeodesicPath wrap = oracle_shortest_path(torus, {0, {0.1, 0.5}, {}},
                                           {0, {0.9, 0.5}, {}});
  CHECK(wrap.length == doctest::Approx(0.2).epsilon(1e-9));

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 25; ++i) {
    Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    GeodesicPath path =
        oracle_shortest_path(torus, {0, a, {}}, {0, b, {}});
    CHECK(path.length ==
          doctest::Approx(cf::torus_distance(a, b)).epsilon(1e-9));
  }

  Portalgon cyl = instances::cylinder(1.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
    GeodesicPath path = oracle_shortest_path(cyl, {0, a, {}}, {0, b, {}});
    CHECK(path.length ==
          doctest::Approx(cf::cylinder_distance(1.0, a, b)).epsilon(1e-9));
  }
}

TEST_CASE("oracle path structure") {
  Portalgon cyl = instances::cylinder(1.0, 1.0);
  GeodesicPath path = oracle_shortest_path(cyl, {0, {0.1, 0.5}, {}},
                                           {0, {0.9, 0.6}, {}});
  // Wraps once through the seam: two visits to the single fragment.
  CHECK(path.signature.crossing_count() == 1);
  auto profile = crossing_profile(path);
  CHECK(profile[0] == 2);

  // Length equals the polyline length.
  double sum = 0.0;
  for (const PathVisit& v : path.visits) sum += v.length();
  CHECK(sum == doctest::Approx(path.length).epsilon(1e-9));

  // Straightness across the seam: directions agree after the transition.
  REQUIRE(path.visits.size() == 2);
  Point d1 = path.visits[0].polyline.back() - path.visits[0].polyline.front();
  Point d2 = path.visits[1].polyline.back() - path.visits[1].polyline.front();
  Isometry t = cyl.transition(0, 1);  // crossing out of the right half
  Point d1m = t.apply_vector(d1);
  CHECK(std::abs(cross(d1m, d2)) <= 1e-9);
}

TEST_CASE("oracle on the mobius band and pyramid") {
  Portalgon mob = instances::mobius();
  // Going around the band flips the vertical coordinate.
  GeodesicPath around = oracle_shortest_path(mob, {0, {0.1, 0.3}, {}},
                                             {0, {0.9, 0.7}, {}});
  CHECK(around.length == doctest::Approx(0.2).epsilon(1e-9));

  Portalgon pyr = instances::bottomless_pyramid();
  // Symmetry and triangle inequality on sampled triples.
  std::mt19937 rng(31);
  for (int i = 0; i < 10; ++i) {
    SurfacePoint a = random_surface_point(pyr, rng());
    SurfacePoint b = random_surface_point(pyr, rng());
    SurfacePoint c = random_surface_point(pyr, rng());
    double ab = oracle_shortest_path(pyr, a, b).length;
    double ba = oracle_shortest_path(pyr, b, a).length;
    double ac = oracle_shortest_path(pyr, a, c).length;
    double cb = oracle_shortest_path(pyr, c, b).length;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
    CHECK(ab <= ac + cb + 1e-9);
  }
}

TEST_CASE("oracle winds through the spiral") {
  int h = 7;
  Portalgon sp = instances::spiral(h);
  GeodesicPath path = oracle_shortest_path(
      sp, instances::spiral_witness_s(h), instances::spiral_witness_t(h));
  CHECK(path.length ==
        doctest::Approx(cf::spiral_distance(
                            h, instances::spiral_witness_s(h).location,
                            instances::spiral_witness_t(h).location))
            .epsilon(1e-9));
  CHECK(path.signature.crossing_count() == h);
  auto profile = crossing_profile(path);
  CHECK(profile[0] == h + 1);
}

TEST_CASE("oracle distances are preserved by triangulation") {
  for (const Portalgon& p :
       {instances::flat_torus(), instances::bottomless_pyramid(),
        instances::spiral(3)}) {
    Triangulation tri = triangulate(p);
    std::mt19937 rng(41);
    for (int i = 0; i < 6; ++i) {
      SurfacePoint a = random_surface_point(p, rng());
      SurfacePoint b = random_surface_point(p, rng());
      double before = oracle_shortest_path(p, a, b).length;
      // Re-home the same points in the triangulation.
      SurfacePoint a2, b2;
      bool founda = false, foundb = false;
      for (const Fragment& f : tri.portalgon.fragments()) {
        double tol = kEpsRel * std::max(1.0, f.diameter());
        if (!founda && tri.source_of(f.id) == a.fragment &&
            point_in_polygon(a.location, f.vertices, tol)) {
          a2 = {f.id, a.location, {}};
          founda = true;
        }
        if (!foundb && tri.source_of(f.id) == b.fragment &&
            point_in_polygon(b.location, f.vertices, tol)) {
          b2 = {f.id, b.location, {}};
          foundb = true;
        }
      }
      REQUIRE(founda);
      REQUIRE(foundb);
      double after = oracle_shortest_path(tri.portalgon, a2, b2).length;
      CHECK(after == doctest::Approx(before).epsilon(1e-9));
    }
  }
}

TEST_CASE("budget exceeded is reported") {
  Portalgon sp = instances::spiral(6);
  SearchBudget tiny;
  tiny.max_expansions = 3;
  OracleResult r = oracle_shortest_path_bounded(
      sp, instances::spiral_witness_s(6), instances::spiral_witness_t(6), tiny);
  CHECK_FALSE(r.complete);
  CHECK_THROWS_AS(oracle_shortest_path(sp, instances::spiral_witness_s(6),
                                       instances::spiral_witness_t(6), tiny),
                  Error);
}
