#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "portalgon/instances.hpp"
#include "portalgon/model.hpp"

using namespace portalgon;

namespace {

Portalgon plain_square() {
  Fragment f;
  f.id = 0;
  f.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return Portalgon({f}, {});
}

}  // namespace

TEST_CASE("validate basic cases") {
  CHECK(validate(plain_square()).empty());

  // Left edge (length 1) glued to a top edge of length 2.
  Fragment f;
  f.id = 0;
  f.vertices = {{0, 0}, {2, 0}, {2, 1}, {0, 1}};
  Portal p;
  p.half[0] = {0, 3, true};  // left, length 1
  p.half[1] = {0, 2, true};  // top, length 2
  Portalgon bad({f}, {p});
  auto v = validate(bad);
  REQUIRE_FALSE(v.empty());
  CHECK(v.front().rule == "LengthMismatch");

  CHECK(validate(instances::flat_torus()).empty());
  CHECK(validate(instances::cylinder()).empty());
  CHECK(validate(instances::mobius()).empty());
  CHECK(validate(instances::bottomless_pyramid()).empty());
  CHECK(validate(instances::spiral(7)).empty());
  CHECK(validate(instances::lowerbound_family(4, 8)).empty());
  CHECK(validate(instances::angle_wedge(M_PI / 3)).empty());
  CHECK(validate(instances::parallelogram()).empty());
  CHECK(validate(instances::three_fragment_ring()).empty());
  CHECK(validate(instances::four_fragments_five_portals()).empty());
  CHECK(validate(instances::random_disk_triangulation(8, 1)).empty());
  CHECK(validate(instances::leafy_tree()).empty());
}

TEST_CASE("fragment graph counts") {
  FragmentGraph torus = fragment_graph(instances::flat_torus());
  CHECK(torus.nodes.size() == 1);
  CHECK(torus.links.size() == 2);
  CHECK(torus.links[0].first == torus.links[0].second);
  CHECK(torus.independent_cycles() == 2);

  FragmentGraph five = fragment_graph(instances::four_fragments_five_portals());
  CHECK(five.nodes.size() == 4);
  CHECK(five.links.size() == 5);

  FragmentGraph none = fragment_graph(plain_square());
  CHECK(none.nodes.size() == 1);
  CHECK(none.links.empty());
  CHECK(none.independent_cycles() == 0);

  CHECK(fragment_graph(instances::three_fragment_ring()).independent_cycles() == 1);
  CHECK(fragment_graph(instances::leafy_tree()).independent_cycles() == 0);
}

TEST_CASE("vertex classes") {
  Portalgon torus = instances::flat_torus();
  // All four square corners are one surface vertex.
  int c = torus.vertex_class(0, 0);
  for (int v = 1; v < 4; ++v) CHECK(torus.vertex_class(0, v) == c);
  CHECK(torus.vertex_class_count() == 1);

  Portalgon pyr = instances::bottomless_pyramid();
  // Apexes all identified; base corners pair up around the ring.
  int apex = pyr.vertex_class(0, 2);
  for (int i = 1; i < 4; ++i) CHECK(pyr.vertex_class(i, 2) == apex);
  CHECK(pyr.vertex_class_count() == 5);  // apex + 4 base corners
}

TEST_CASE("transition isometries glue twins") {
  for (const Portalgon& p :
       {instances::flat_torus(), instances::mobius(),
        instances::bottomless_pyramid(), instances::spiral(3),
        instances::lowerbound_family(3, 4)}) {
    for (size_t pi = 0; pi < p.portals().size(); ++pi) {
      for (int h = 0; h < 2; ++h) {
        Isometry t = p.transition((int)pi, h);
        CHECK(t.well_formed());
        Segment from = p.directed_segment(p.portals()[pi].half[h]);
        Segment to = p.directed_segment(p.portals()[pi].half[1 - h]);
        double scale = from.length();
        for (double u : {0.0, 0.25, 0.7, 1.0})
          CHECK(points_close(t.apply(from.at(u)), to.at(u), scale));
        // Round trip is the identity.
        Isometry back = compose(p.transition((int)pi, 1 - h), t);
        Point q{0.3, 0.4};
        CHECK(points_close(back.apply(q), q, scale));
      }
    }
  }
}

TEST_CASE("twin_point preserves parameters") {
  Portalgon torus = instances::flat_torus();
  SurfacePoint tw = torus.twin_point({0, 3}, 0.25);  // left edge local t
  // Left edge runs (0,1)->(0,0); local 0.25 is (0, 0.75); twin is (1, 0.75).
  CHECK(points_close(tw.location, {1.0, 0.75}, 1.0));

  Portalgon mob = instances::mobius();
  SurfacePoint mtw = mob.twin_point({0, 3}, 0.25);
  // (0,0.75) on the band seam glues to (1, 1-0.75).
  CHECK(points_close(mtw.location, {1.0, 0.25}, 1.0));
}

TEST_CASE("locate") {
  Portalgon p = instances::flat_torus();
  ContainmentReport in = locate(p, {0, {0.5, 0.5}, {}});
  CHECK(in.kind == ContainmentReport::Kind::Interior);

  ContainmentReport on = locate(p, {0, {0.0, 0.5}, {}});
  CHECK(on.kind == ContainmentReport::Kind::OnEdge);
  REQUIRE(on.twin.has_value());
  CHECK(points_close(on.twin->location, {1.0, 0.5}, 1.0));

  ContainmentReport at = locate(p, {0, {0.0, 1.0}, {}});
  CHECK(at.kind == ContainmentReport::Kind::Vertex);

  CHECK_THROWS_AS(locate(p, {0, {2.0, 0.5}, {}}), Error);
}

TEST_CASE("triangulate a lone triangle is unchanged") {
  Fragment f;
  f.id = 0;
  f.vertices = {{0, 0}, {2, 0}, {0, 2}};
  Triangulation t = triangulate(Portalgon({f}, {}));
  CHECK(t.portalgon.fragments().size() == 1);
  CHECK(t.portalgon.portals().empty());
}

TEST_CASE("triangulate square") {
  Triangulation t = triangulate(plain_square());
  CHECK(t.portalgon.fragments().size() == 2);
  CHECK(t.portalgon.portals().size() == 1);
  CHECK(t.portal_is_diagonal[0]);
  CHECK(validate(t.portalgon).empty());
}

TEST_CASE("triangulate flat torus with source vertex") {
  Portalgon torus = instances::flat_torus();
  Triangulation t = triangulate(torus, {{0, {0.5, 0.5}, {}}});
  CHECK(validate(t.portalgon).empty());
  for (const Fragment& f : t.portalgon.fragments()) CHECK(f.size() == 3);

  // Extra vertex is a triangulation vertex.
  REQUIRE(t.extra_vertex_at.size() == 1);
  auto [fid, vidx] = t.extra_vertex_at[0];
  CHECK(points_close(t.portalgon.frag(fid).vertices[vidx], {0.5, 0.5}, 1.0));

  // Any two triangles share at most one edge, and none with itself.
  std::map<std::pair<int, int>, int> pair_count;
  for (const Portal& portal : t.portalgon.portals()) {
    int a = portal.half[0].fragment, b = portal.half[1].fragment;
    CHECK(a != b);
    auto key = std::minmax(a, b);
    pair_count[{key.first, key.second}]++;
  }
  for (auto& [k, c] : pair_count) CHECK(c == 1);
}

TEST_CASE("triangulate keeps sources on portal edges") {
  // Source on the torus seam: the portal must be split consistently.
  Portalgon torus = instances::flat_torus();
  Triangulation t = triangulate(torus, {{0, {0.0, 0.5}, {}}});
  CHECK(validate(t.portalgon).empty());
  auto [fid, vidx] = t.extra_vertex_at[0];
  Point at = t.portalgon.frag(fid).vertices[vidx];
  CHECK((points_close(at, {0.0, 0.5}, 1.0) || points_close(at, {1.0, 0.5}, 1.0)));
}

TEST_CASE("triangulate the corpus") {
  for (const Portalgon& p :
       {instances::flat_torus(), instances::cylinder(), instances::mobius(),
        instances::bottomless_pyramid(), instances::spiral(3),
        instances::lowerbound_family(3, 4), instances::angle_wedge(M_PI / 3),
        instances::parallelogram(), instances::three_fragment_ring(),
        instances::random_disk_triangulation(9, 3)}) {
    Triangulation t = triangulate(p);
    CHECK(validate(t.portalgon).empty());
    for (const Fragment& f : t.portalgon.fragments()) CHECK(f.size() == 3);
    std::map<std::pair<int, int>, int> pair_count;
    bool ok = true;
    for (const Portal& portal : t.portalgon.portals()) {
      int a = portal.half[0].fragment, b = portal.half[1].fragment;
      if (a == b) ok = false;
      auto key = std::minmax(a, b);
      if (++pair_count[{key.first, key.second}] > 1) ok = false;
    }
    CHECK(ok);
  }
}
