#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "portalgon/geom.hpp"

// The portalgon data model: fragments (simple polygons, each in its own
// plane), portals (pairs of directed equal-length edges glued pointwise by
// arclength parameter), the fragment graph, validation, triangulation, and
// surface-point addressing.

namespace portalgon {

struct Fragment {
  int id = 0;
  std::vector<Point> vertices;  // ccw boundary; edge i joins v[i] to v[i+1]

  int size() const { return static_cast<int>(vertices.size()); }
  Segment edge(int i) const {
    int n = size();
    return {vertices[i % n], vertices[(i + 1) % n]};
  }
  double diameter() const;
  Point centroid() const;
};

// A directed portal edge: fragment edge `edge_index`, traversed along the
// ccw boundary when !reversed, against it when reversed. Gluing identifies
// equal parameters of the two directed edges of a portal.
struct PortalEdgeRef {
  int fragment = 0;
  int edge_index = 0;
  bool reversed = false;

  friend bool operator==(const PortalEdgeRef& a, const PortalEdgeRef& b) {
    return a.fragment == b.fragment && a.edge_index == b.edge_index &&
           a.reversed == b.reversed;
  }
};

struct Portal {
  PortalEdgeRef half[2];
};

struct Violation {
  std::string rule;
  std::string detail;
  int fragment = -1;  // -1 when not fragment-specific
  int portal = -1;
};

// Identifies a fragment edge regardless of direction.
struct EdgeId {
  int fragment = 0;
  int edge_index = 0;
  friend bool operator==(const EdgeId& a, const EdgeId& b) {
    return a.fragment == b.fragment && a.edge_index == b.edge_index;
  }
  friend bool operator<(const EdgeId& a, const EdgeId& b) {
    return a.fragment != b.fragment ? a.fragment < b.fragment
                                    : a.edge_index < b.edge_index;
  }
};

struct SurfacePoint {
  int fragment = 0;
  Point location;
  // Set when the point is addressed as a position on an edge.
  std::optional<std::pair<int, double>> edge_param;
};

struct FragmentGraph {
  std::vector<int> nodes;                    // fragment ids
  std::vector<std::pair<int, int>> links;    // one per portal (frag ids)
  std::vector<int> degree() const;           // self-loops count twice
  int independent_cycles() const;            // links - nodes + components
};

class Portalgon {
 public:
  Portalgon() = default;
  Portalgon(std::vector<Fragment> fragments, std::vector<Portal> portals);

  const std::vector<Fragment>& fragments() const { return fragments_; }
  const std::vector<Portal>& portals() const { return portals_; }

  const Fragment& frag(int id) const;
  int fragment_index(int id) const;

  int total_vertices() const;
  int portal_edge_count() const { return 2 * (int)portals_.size(); }
  double scale() const;  // max fragment diameter, >= 1 floor not applied

  // Portal lookup by fragment edge; (portal index, half index) or nothing.
  std::optional<std::pair<int, int>> portal_at(EdgeId e) const;
  bool is_portal_edge(EdgeId e) const { return portal_at(e).has_value(); }

  Segment directed_segment(const PortalEdgeRef& ref) const;

  // Isometry mapping the plane of `from_half`'s fragment into the plane of
  // the other half's fragment; points on the from edge land on their twins.
  Isometry transition(int portal_index, int from_half) const;

  // Twin of a point given at local parameter t on a portal edge (local =
  // along the ccw boundary direction of that fragment edge).
  SurfacePoint twin_point(EdgeId e, double t_local) const;

  // Surface vertex classes (corners identified across portal endpoints).
  int vertex_class(int fragment_id, int vertex_index) const;
  int vertex_class_count() const { return class_count_; }
  const std::vector<std::pair<int, int>>& vertex_class_members(int cls) const;

  void rebuild_indexes();

 private:
  std::vector<Fragment> fragments_;
  std::vector<Portal> portals_;

  std::map<int, int> id_to_index_;
  std::map<EdgeId, std::pair<int, int>> edge_to_portal_;
  std::vector<int> vertex_class_;  // flattened (fragment, vertex) -> class
  std::vector<int> vertex_offset_;
  int class_count_ = 0;
  std::vector<std::vector<std::pair<int, int>>> class_members_;
};

std::vector<Violation> validate(const Portalgon& p);

FragmentGraph fragment_graph(const Portalgon& p);

struct ContainmentReport {
  enum class Kind { Interior, OnEdge, Vertex } kind = Kind::Interior;
  int edge_index = -1;
  double t = 0.0;  // local edge parameter when on an edge
  int vertex_index = -1;
  int vertex_class = -1;
  std::optional<SurfacePoint> twin;  // set for portal-edge points
};

ContainmentReport locate(const Portalgon& p, const SurfacePoint& q);

struct Triangulation {
  Portalgon portalgon;
  // For each fragment of `portalgon`, the id of the source fragment.
  std::vector<int> source_fragment;
  // For each portal, whether it arose as a triangulation diagonal (or a
  // subdivision spoke) rather than an original portal.
  std::vector<bool> portal_is_diagonal;
  // For each portal, the index of the original portal it carries (-1 for
  // diagonals and spokes).
  std::vector<int> portal_source;
  // Where the requested extra vertices ended up: (fragment id, vertex index).
  std::vector<std::pair<int, int>> extra_vertex_at;

  int source_of(int fragment_id) const {
    return source_fragment[portalgon.fragment_index(fragment_id)];
  }
};

Triangulation triangulate(const Portalgon& p,
                          const std::vector<SurfacePoint>& extra_vertices = {});

// For each vertex class of the triangulation, the vertex class of the
// original portalgon it descends from, or -1 for subdivision vertices.
std::vector<int> original_vertex_classes(const Triangulation& t,
                                         const Portalgon& original);

// Local edge parameter <-> directed portal parameter.
inline double directed_param(double t_local, bool reversed) {
  return reversed ? 1.0 - t_local : t_local;
}
inline double local_param(double t_directed, bool reversed) {
  return reversed ? 1.0 - t_directed : t_directed;
}

}  // namespace portalgon
