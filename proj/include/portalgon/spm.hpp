#pragma once

#include <array>
#include <memory>

#include "portalgon/envelope.hpp"
#include "portalgon/unfold.hpp"

// Continuous-Dijkstra sweep computing the shortest path map restricted to
// the edges of a triangulated portalgon, plus the interior extension and
// point queries.
//
// Per sweep edge between triangles T_A and T_B the engine keeps the two
// signature sets as apexed distance functions, their lower envelopes, the
// sweep-line intersection order, and the pending events (function minima,
// envelope vertices, A/B crossings). A conservative fixpoint pass after the
// queue drains re-seeds any vertex whose distance improved and propagates
// any function that ended up realizing a final envelope piece; late
// insertions never disturb the part of the envelope already below the
// sweep line, so extra passes only add missing signatures.

namespace portalgon {

// One propagated signature restricted to one edge side.
struct SpmFunction {
  int id = -1;
  int edge = -1;       // sweep edge index
  int side = 0;        // 0/1: which incident fragment the path arrives in
  int fragment = 0;    // that fragment's id
  ApexedDistanceFunction fn;  // edge geometry in the side plane, shared t
  Segment gate;        // entry window in the side plane (crossing funcs)
  bool has_gate = false;
  int pred = -1;
  SignatureElement elem;   // last signature element
  double hop_t = -1.0;     // vertex seeds: endpoint param on pred's edge
  Isometry from_pred;      // pred side plane -> this side plane (crossings)
  int depth = 0;
  bool propagated = false;
  bool min_done = false;
  int env_id = -1;
};

struct EdgeSpmInterval {
  Interval span;  // shared edge parameter
  int fn = -1;    // SpmFunction id
};

struct SweepEdgeInfo {
  bool boundary = false;
  int portal = -1;          // portal index when not boundary
  EdgeId half[2];           // half[1] only valid for portal edges
  double length = 0.0;
};

struct SpmCounters {
  long events_a = 0, events_b = 0, events_c = 0;
  long functions = 0;
  long repair_rounds = 0;
  long envelope_intervals_created = 0;
  long envelope_intervals_deleted = 0;
};

struct EdgeSPM {
  std::vector<SweepEdgeInfo> edges;
  std::vector<std::vector<EdgeSpmInterval>> intervals;  // per sweep edge
  std::vector<std::array<int, 2>> side_counts;          // |S_A|, |S_B|
  std::vector<std::array<long, 2>> type_a_per_edge;
  std::vector<SpmFunction> functions;
  std::vector<double> vertex_distance;  // per triangulation vertex class
  SpmCounters counters;

  // Sweep edge index and side for a fragment edge.
  std::map<EdgeId, std::pair<int, int>> edge_index;
};

EdgeSPM compute_edge_spm(const Triangulation& t, const SurfacePoint& source);

// Interior subdivision of one triangle: the additively weighted Voronoi
// diagram of the boundary interval apexes (plus the triangle corners),
// clipped to the triangle and discretized on a barycentric winner grid.
struct TriangleGenerator {
  Point apex;          // in the triangle's plane
  double offset = 0.0;
  int fn = -1;         // source SpmFunction (-1 for corner generators)
  int corner = -1;     // corner index for vertex generators
};

struct TriangleInterior {
  int fragment = 0;
  std::vector<TriangleGenerator> generators;
  int grid_n = 0;
  std::vector<int> winner;  // (grid_n+1)^2 entries, -1 outside
  int cell_count = 0;       // connected winner regions
  std::vector<std::pair<int, int>> adjacent_generators;
};

struct TriangleSPM {
  std::vector<TriangleInterior> triangles;
  int total_cells = 0;
};

TriangleSPM extend_to_interior(const Triangulation& t, const EdgeSPM& edge_spm,
                               int grid_n = 48);

struct SpmComplexity {
  int edge_intervals = 0;
  int interior_cells = 0;
  int signatures = 0;
  int prefix_leaves = 0;
  int prefix_depth = 0;
  int prefix_max_branching = 0;
  int prefix_multi_children = 0;
};

class ShortestPathMap {
 public:
  // Triangulates the portalgon with the source as an extra vertex and runs
  // the sweep; the interior map is optional.
  static ShortestPathMap compute(const Portalgon& p, const SurfacePoint& source,
                                 bool edges_only = false, int grid_n = 48);

  const Triangulation& triangulation() const { return tri_; }
  const Portalgon& original() const { return *orig_; }
  const EdgeSPM& edge_map() const { return edge_map_; }
  const TriangleSPM& interior_map() const { return interior_map_; }
  const SurfacePoint& source() const { return source_; }

  // Distance and path to a point given in original fragment coordinates.
  GeodesicPath query(const SurfacePoint& q) const;
  double distance(const SurfacePoint& q) const;

  SpmComplexity complexity() const;

 private:
  std::shared_ptr<const Portalgon> orig_;
  Triangulation tri_;
  SurfacePoint source_;
  int source_class_ = -1;
  EdgeSPM edge_map_;
  TriangleSPM interior_map_;
  std::vector<int> orig_classes_;

  std::pair<int, Point> locate_triangle(const SurfacePoint& q) const;
};

SpmComplexity spm_complexity(const ShortestPathMap& spm);

}  // namespace portalgon
