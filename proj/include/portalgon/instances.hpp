#pragma once

#include <cstdint>

#include "portalgon/model.hpp"

// Builders for the small instance corpus: canonical closed surfaces, the
// winding families, and randomized triangulations. Each builder returns a
// portalgon that passes validate().

namespace portalgon::instances {

// Unit square, left-right and bottom-top glued; one vertex class.
Portalgon flat_torus();

// width x height rectangle, left-right glued.
Portalgon cylinder(double width = 1.0, double height = 1.0);

// Unit square, left-right glued with a flip (non-orientable).
Portalgon mobius();

// Four equilateral-ish side triangles of a square pyramid, open base.
Portalgon bottomless_pyramid();

// One parallelogram fragment whose bottom and top edges form a single
// portal with unit shift; the canonical witness pair below winds about
// `windings` times through the portal.
Portalgon spiral(int windings);
SurfacePoint spiral_witness_s(int windings);
SurfacePoint spiral_witness_t(int windings);

// Chain of `slabs` rectangular slabs with an additional drifted bottom-top
// gluing; a long witness path crosses each of the slab portals about
// `windings` times.
Portalgon lowerbound_family(int slabs, int windings);
SurfacePoint lowerbound_witness_s(int slabs, int windings);
SurfacePoint lowerbound_witness_t(int slabs, int windings);

// Fragment with two portal edges meeting at the given angle (supporting
// lines), nearly touching, so shortest paths can wind around the wedge.
Portalgon angle_wedge(double alpha, double near_touch = 0.02);

// Parallelogram with two horizontal portal edges and the given shift.
Portalgon parallelogram(double width = 3.0, double height = 2.0,
                        double shift = 1.0);

// Ring of three parallelogram fragments; the fragment graph is a 3-cycle
// and the loop accumulates a nonzero drift.
Portalgon three_fragment_ring(double drift = 0.3);

// Four fragments, five portals (for the fragment-graph counting test).
Portalgon four_fragments_five_portals();

// Triangulated random convex-ish polygon (diagonals become portals).
Portalgon random_disk_triangulation(int sides, uint32_t seed);

// A tree-shaped fragment graph: a square with two leaf fragments.
Portalgon leafy_tree();

namespace closed_form {

// Geodesic distance on flat_torus() between fragment-local points.
double torus_distance(Point s, Point t);

// Geodesic distance on cylinder(width, .) between fragment-local points.
double cylinder_distance(double width, Point s, Point t);

// Geodesic distance on spiral(windings) between fragment-local points,
// assuming the optimal unfolded segment stays inside the strip (true for
// points away from the left/right ends).
double spiral_distance(int windings, Point s, Point t);

}  // namespace closed_form

}  // namespace portalgon::instances
