#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "portalgon/model.hpp"

// Signatures, walk unfolding, apexed distance functions, and the exact
// brute-force shortest path search used as ground truth by the rest of the
// library.

namespace portalgon {

struct SignatureElement {
  enum class Kind { Vertex, Crossing } kind = Kind::Vertex;
  // Vertex: a = surface vertex class. Crossing: a = portal index,
  // b = half index the path crosses out of.
  int a = 0;
  int b = 0;

  static SignatureElement vertex(int cls) {
    return {Kind::Vertex, cls, 0};
  }
  static SignatureElement crossing(int portal, int from_half) {
    return {Kind::Crossing, portal, from_half};
  }
  friend bool operator==(const SignatureElement& x, const SignatureElement& y) {
    return x.kind == y.kind && x.a == y.a && x.b == y.b;
  }
  friend bool operator<(const SignatureElement& x, const SignatureElement& y) {
    if (x.kind != y.kind) return x.kind < y.kind;  // vertices before portals
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  }
};

struct Signature {
  std::vector<SignatureElement> elements;

  int crossing_count() const;
  friend bool operator==(const Signature& x, const Signature& y) {
    return x.elements == y.elements;
  }
  friend bool operator<(const Signature& x, const Signature& y) {
    return std::lexicographical_compare(x.elements.begin(), x.elements.end(),
                                        y.elements.begin(), y.elements.end());
  }
};

// Distance function of one signature restricted to an edge: the unfolded
// pseudo-source `apex`, the accumulated distance `offset` to it, and the
// parameter interval of the edge reachable by a straight threaded segment.
struct ApexedDistanceFunction {
  Segment edge;      // edge geometry in the apex's plane
  Point apex;
  double offset = 0.0;
  Interval domain{0.0, 1.0};
  Signature signature;

  double value(double t) const { return offset + dist(apex, edge.at(t)); }
  // Parameter of the unconstrained minimum clamped into the domain.
  double min_param() const;
  double min_value() const { return value(min_param()); }
};

// Parameter interval on `target` reachable from `apex` by straight segments
// that cross every gate segment, in order. Returns an empty interval when
// the configuration admits no straight realization.
Interval thread_gates(Point apex, const std::vector<Segment>& gates,
                      const Segment& target);

// True when the straight segment apex -> pt crosses every gate in order.
bool threads_to_point(Point apex, const std::vector<Segment>& gates, Point pt);

// Intersection parameters of two apexed functions over a common edge
// parameterization (their edge segments must have equal length). At most
// two parameters; solved algebraically with a residual filter.
std::vector<double> apexed_intersections(const ApexedDistanceFunction& f,
                                         const ApexedDistanceFunction& g);

// Composed isometry carrying the plane of the signature's starting fragment
// into `into_fragment`'s plane along the crossing sequence.
Isometry unfold_along(const Portalgon& p, const Signature& sig,
                      int into_fragment);

// f_{sigma|e}: rebuilds the unfolding of `sig` (after its last vertex) and
// intersects the threading constraints on `edge`.
ApexedDistanceFunction distance_function(const Portalgon& p,
                                         const Signature& sig,
                                         const PortalEdgeRef& edge,
                                         const SurfacePoint& source,
                                         double dist_to_last_vertex);

struct PathVisit {
  int fragment = 0;
  std::vector<Point> polyline;  // straight pieces in fragment coordinates
  double length() const;
};

struct GeodesicPath {
  double length = 0.0;
  Signature signature;
  std::vector<PathVisit> visits;
};

struct SearchBudget {
  // 0 means "derive from the instance": 64 + 16 * portal count.
  int max_signature_length = 0;
  long max_expansions = 1'000'000;
};

struct OracleResult {
  GeodesicPath path;
  bool complete = false;
  long expansions = 0;
};

// Exact shortest path by best-first search over signatures on the
// triangulated surface; ties broken by minimum complexity, then
// lexicographic signature order.
OracleResult oracle_shortest_path_bounded(const Portalgon& p,
                                          const SurfacePoint& s,
                                          const SurfacePoint& t,
                                          const SearchBudget& budget = {});

// As above but throws BudgetExceeded when the search was cut short.
GeodesicPath oracle_shortest_path(const Portalgon& p, const SurfacePoint& s,
                                  const SurfacePoint& t,
                                  const SearchBudget& budget = {});

// Number of maximal connected components of the path in each fragment.
std::map<int, int> crossing_profile(const GeodesicPath& path);

// Deterministic random surface point (area-weighted fragment choice,
// rejection sampling inside it).
SurfacePoint random_surface_point(const Portalgon& p, uint64_t seed);

}  // namespace portalgon
