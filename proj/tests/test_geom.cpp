#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "portalgon/geom.hpp"

using namespace portalgon;

namespace {

Isometry random_isometry(std::mt19937& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> off(-10.0, 10.0);
  Isometry r = Isometry::rotation(ang(rng));
  r.translation = {off(rng), off(rng)};
  if (rng() & 1) {
    // compose with reflection across x-axis
    Isometry f{1.0, 0.0, 0.0, -1.0, {0.0, 0.0}, true};
    r = compose(r, f);
  }
  return r;
}

Point random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> c(-20.0, 20.0);
  return {c(rng), c(rng)};
}

}  // namespace

TEST_CASE("compose identity and rotations") {
  Isometry id = Isometry::identity();
  Isometry r = compose(id, id);
  CHECK(points_close(r.apply({3.0, 4.0}), {3.0, 4.0}, 10.0));
  CHECK_FALSE(r.orientation_reversing);

  Isometry q = Isometry::rotation(M_PI / 2.0);
  Isometry h = compose(q, q);
  Isometry pi = Isometry::rotation(M_PI);
  Point p{1.0, 2.0};
  CHECK(points_close(h.apply(p), pi.apply(p), 10.0));

  Isometry fx{1.0, 0.0, 0.0, -1.0, {0.0, 0.0}, true};
  Isometry ff = compose(fx, fx);
  CHECK(points_close(ff.apply(p), p, 10.0));
  CHECK_FALSE(ff.orientation_reversing);
}

TEST_CASE("glue_isometry examples") {
  Segment s{{0.0, 0.0}, {1.0, 0.0}};
  Isometry id = glue_isometry(s, s, false);
  CHECK(points_close(id.apply({0.3, 0.7}), {0.3, 0.7}, 1.0));

  Segment up{{0.0, 1.0}, {1.0, 1.0}};
  Isometry t = glue_isometry(s, up, false);
  CHECK(points_close(t.apply({0.5, 0.0}), {0.5, 1.0}, 1.0));
  CHECK(points_close(t.translation, {0.0, 1.0}, 1.0));

  // Rotation by pi/2 plus translation; image of (1,0) is (5,1).
  Segment a{{0.0, 0.0}, {2.0, 0.0}};
  Segment b{{5.0, 0.0}, {5.0, 2.0}};
  Isometry r = glue_isometry(a, b, false);
  CHECK(points_close(r.apply({1.0, 0.0}), {5.0, 1.0}, 5.0));
  CHECK(points_close(r.apply({2.0, 0.0}), {5.0, 2.0}, 5.0));
  CHECK(r.well_formed());

  CHECK_THROWS_AS(glue_isometry(a, up, false), Error);
}

TEST_CASE("glue_isometry inverse relation") {
  std::mt19937 rng(7);
  for (int i = 0; i < 50; ++i) {
    Point p = random_point(rng), q = random_point(rng);
    Point u = random_point(rng);
    Segment s1{p, q};
    double len = s1.length();
    if (len < 1e-6) continue;
    Point dir{std::cos(i * 0.37), std::sin(i * 0.37)};
    Segment s2{u, u + len * dir};
    for (bool flip : {false, true}) {
      Isometry g = glue_isometry(s1, s2, flip);
      Isometry back = glue_isometry(s2, s1, flip);
      Isometry both = compose(back, g);
      Point x = random_point(rng);
      CHECK(points_close(both.apply(x), x, 50.0));
      CHECK(points_close(g.inverse().apply(g.apply(x)), x, 50.0));
    }
  }
}

TEST_CASE("isometries preserve distances") {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    Isometry g = random_isometry(rng);
    CHECK(g.well_formed());
    Point p = random_point(rng), q = random_point(rng);
    double before = dist(p, q);
    double after = dist(g.apply(p), g.apply(q));
    CHECK(std::abs(before - after) <= kEpsRel * std::max(1.0, before));
  }
}

TEST_CASE("compose is associative") {
  std::mt19937 rng(13);
  for (int i = 0; i < 100; ++i) {
    Isometry a = random_isometry(rng), b = random_isometry(rng),
             c = random_isometry(rng);
    Isometry l = compose(compose(a, b), c);
    Isometry r = compose(a, compose(b, c));
    Point p = random_point(rng);
    CHECK(points_close(l.apply(p), r.apply(p), 100.0));
    CHECK(l.orientation_reversing == r.orientation_reversing);
  }
}

TEST_CASE("circumcircle") {
  Circle c1 = circumcircle({0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0});
  CHECK(points_close(c1.center, {0.5, 0.5}, 1.0));
  CHECK(std::abs(c1.radius - std::sqrt(0.5)) <= 1e-9);

  // Independent check by perpendicular bisectors: center of
  // (0,0),(2,0),(1,1) lies on x=1 and on the bisector of (0,0),(1,1),
  // which meets x=1 at y=0.
  Circle c2 = circumcircle({0.0, 0.0}, {2.0, 0.0}, {1.0, 1.0});
  CHECK(points_close(c2.center, {1.0, 0.0}, 2.0));
  CHECK(std::abs(c2.radius - 1.0) <= 1e-9);
  for (Point p : {Point{0.0, 0.0}, Point{2.0, 0.0}, Point{1.0, 1.0}})
    CHECK(std::abs(dist(c2.center, p) - c2.radius) <= 1e-9 * c2.radius);

  CHECK_THROWS_AS(circumcircle({0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}), Error);
}

TEST_CASE("polygon helpers") {
  std::vector<Point> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_signed_area(square) == doctest::Approx(1.0));
  CHECK(polygon_is_simple(square, 1e-12));
  CHECK(point_in_polygon({0.5, 0.5}, square, 1e-12));
  CHECK(point_in_polygon({0.0, 0.5}, square, 1e-9));
  CHECK_FALSE(point_in_polygon({1.5, 0.5}, square, 1e-9));

  std::vector<Point> bow = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_FALSE(polygon_is_simple(bow, 1e-12));

  // Collinear boundary vertex is fine.
  std::vector<Point> withmid = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {0, 1}};
  CHECK(polygon_is_simple(withmid, 1e-12));
}
