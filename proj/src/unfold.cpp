#include "portalgon/unfold.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <random>

namespace portalgon {

int Signature::crossing_count() const {
  int c = 0;
  for (const SignatureElement& e : elements)
    if (e.kind == SignatureElement::Kind::Crossing) ++c;
  return c;
}

double ApexedDistanceFunction::min_param() const {
  Point d = edge.dir();
  double len2 = norm2(d);
  double t = len2 > 0.0 ? dot(apex - edge.a, d) / len2 : 0.0;
  return std::clamp(t, domain.lo, domain.hi);
}

namespace {

constexpr double kParamTol = 1e-9;

// Crossing parameters of the segment apex->pt with every gate: u along the
// segment (apex at 0, pt at 1) and g along the gate. All gates must be
// crossed inside their extent, in order, before reaching pt.
bool gate_chain_valid(Point apex, const std::vector<Segment>& gates,
                      Point pt) {
  Point d = pt - apex;
  if (norm(d) == 0.0) return gates.empty();
  double prev_u = -kParamTol;
  for (const Segment& g : gates) {
    auto hit = line_line(apex, d, g.a, g.dir());
    if (!hit) {
      // Parallel to the gate: accept only when collinear with it.
      double off_line = std::abs(cross(g.dir(), apex - g.a)) /
                        std::max(g.length(), 1e-300);
      if (off_line > kParamTol * std::max(1.0, g.length())) return false;
      continue;
    }
    double u = hit->first, gp = hit->second;
    if (gp < -kParamTol || gp > 1.0 + kParamTol) return false;
    if (u < prev_u - kParamTol || u > 1.0 + kParamTol) return false;
    prev_u = std::max(prev_u, u);
  }
  return true;
}

}  // namespace

Interval thread_gates(Point apex, const std::vector<Segment>& gates,
                      const Segment& target) {
  Interval iv{0.0, 1.0};
  Point x0 = target.a - apex;
  Point dx = target.dir();
  for (const Segment& g : gates) {
    double span = cross(g.a - apex, g.b - apex);
    double scale = std::max({1.0, norm2(g.a - apex), norm2(g.b - apex)});
    if (std::abs(span) <= kEpsDet * scale) continue;  // gate seen edge-on
    for (int side = 0; side < 2; ++side) {
      Point corner = side == 0 ? g.a : g.b;
      Point other = side == 0 ? g.b : g.a;
      double want = cross(corner - apex, other - apex);
      // sigma(t) = cross(corner-apex, x(t)) must have the sign of `want`.
      double c0 = cross(corner - apex, x0);
      double c1 = cross(corner - apex, dx);
      double s = want > 0 ? 1.0 : -1.0;
      c0 *= s;
      c1 *= s;  // now require c0 + c1 t >= 0
      if (std::abs(c1) <= kEpsDet * scale) {
        if (c0 < 0.0) return {1.0, 0.0};
      } else {
        double root = -c0 / c1;
        if (c1 > 0.0)
          iv.lo = std::max(iv.lo, root - kParamTol);
        else
          iv.hi = std::min(iv.hi, root + kParamTol);
      }
      if (iv.empty()) return {1.0, 0.0};
    }
  }
  if (iv.empty()) return {1.0, 0.0};
  iv.lo = std::clamp(iv.lo, 0.0, 1.0);
  iv.hi = std::clamp(iv.hi, 0.0, 1.0);
  if (!gate_chain_valid(apex, gates, target.at(iv.mid()))) return {1.0, 0.0};
  return iv;
}

bool threads_to_point(Point apex, const std::vector<Segment>& gates,
                      Point pt) {
  return gate_chain_valid(apex, gates, pt);
}

std::vector<double> apexed_intersections(const ApexedDistanceFunction& f,
                                         const ApexedDistanceFunction& g) {
  auto coeffs = [](const ApexedDistanceFunction& h) {
    Point d = h.edge.dir();
    Point w = h.edge.a - h.apex;
    return std::array<double, 3>{norm2(d), 2.0 * dot(w, d), norm2(w)};
  };
  auto cf = coeffs(f);
  auto cg = coeffs(g);
  double dc = g.offset - f.offset;
  double p1 = cf[1] - cg[1];
  double r1 = cf[2] - cg[2];

  std::vector<double> cand;
  if (std::abs(p1) > 1e-300) cand.push_back(-r1 / p1);
  if (std::abs(dc) > 0.0) {
    // (qf - qg - dc^2)^2 = 4 dc^2 qg, one squaring away from polynomial form.
    double r = r1 - dc * dc;
    double A = p1 * p1 - 4.0 * dc * dc * cg[0];
    double B = 2.0 * p1 * r - 4.0 * dc * dc * cg[1];
    double C = r * r - 4.0 * dc * dc * cg[2];
    double sc = std::max({std::abs(A), std::abs(B), std::abs(C), 1e-300});
    if (std::abs(A) <= 1e-14 * sc) {
      if (std::abs(B) > 1e-300) cand.push_back(-C / B);
    } else {
      double disc = B * B - 4.0 * A * C;
      if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        // Numerically stable pair.
        double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
        cand.push_back(q / A);
        if (std::abs(q) > 1e-300) cand.push_back(C / q);
      }
    }
  }

  std::vector<double> out;
  for (double t : cand) {
    if (!std::isfinite(t)) continue;
    double vf = f.value(t), vg = g.value(t);
    if (std::abs(vf - vg) > 1e-9 * std::max(1.0, std::abs(vf))) continue;
    bool dup = false;
    for (double s : out)
      if (std::abs(s - t) <= 1e-12 * std::max(1.0, std::abs(t))) dup = true;
    if (!dup) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Isometry unfold_along(const Portalgon& p, const Signature& sig,
                      int into_fragment) {
  int cur = into_fragment;
  bool anchored = false;
  for (const SignatureElement& e : sig.elements)
    if (e.kind == SignatureElement::Kind::Crossing) {
      cur = p.portals()[e.a].half[e.b].fragment;
      anchored = true;
      break;
    }
  if (!anchored) return Isometry::identity();

  Isometry u = Isometry::identity();
  for (const SignatureElement& e : sig.elements) {
    if (e.kind == SignatureElement::Kind::Vertex) {
      bool member = false;
      for (auto& [fid, v] : p.vertex_class_members(e.a))
        if (fid == cur) member = true;
      if (!member)
        fail(ErrorKind::IncoherentSignature,
             "unfold_along: vertex not incident to current fragment");
      continue;
    }
    const Portal& portal = p.portals()[e.a];
    if (portal.half[e.b].fragment != cur)
      fail(ErrorKind::IncoherentSignature,
           "unfold_along: crossing does not start in current fragment");
    u = compose(p.transition(e.a, e.b), u);
    cur = portal.half[1 - e.b].fragment;
  }
  if (cur != into_fragment)
    fail(ErrorKind::IncoherentSignature,
         "unfold_along: signature does not end in the target fragment");
  return u;
}

ApexedDistanceFunction distance_function(const Portalgon& p,
                                         const Signature& sig,
                                         const PortalEdgeRef& edge,
                                         const SurfacePoint& source,
                                         double dist_to_last_vertex) {
  // Split at the last vertex element: the suffix crossings define the
  // unfolding, the vertex (or the source) is the apex.
  int last_vertex = -1;
  for (int i = 0; i < (int)sig.elements.size(); ++i)
    if (sig.elements[i].kind == SignatureElement::Kind::Vertex) last_vertex = i;

  std::vector<SignatureElement> suffix(
      sig.elements.begin() + (last_vertex + 1), sig.elements.end());

  int anchor;
  if (!suffix.empty())
    anchor = p.portals()[suffix.front().a].half[suffix.front().b].fragment;
  else
    anchor = edge.fragment;

  Point apex;
  if (last_vertex < 0) {
    if (source.fragment != anchor)
      fail(ErrorKind::IncoherentSignature,
           "distance_function: source not in the anchor fragment");
    apex = source.location;
  } else {
    int cls = sig.elements[last_vertex].a;
    bool found = false;
    for (auto& [fid, v] : p.vertex_class_members(cls))
      if (fid == anchor) {
        apex = p.frag(fid).vertices[v];
        found = true;
        break;
      }
    if (!found)
      fail(ErrorKind::IncoherentSignature,
           "distance_function: last vertex not incident to anchor fragment");
  }

  // Forward pass: per-crossing transforms into the final plane.
  std::vector<Isometry> steps;  // A_j maps anchor plane -> plane after j
  Isometry acc = Isometry::identity();
  int cur = anchor;
  for (const SignatureElement& e : suffix) {
    if (e.kind != SignatureElement::Kind::Crossing)
      fail(ErrorKind::IncoherentSignature,
           "distance_function: vertex after the last vertex");
    const Portal& portal = p.portals()[e.a];
    if (portal.half[e.b].fragment != cur)
      fail(ErrorKind::IncoherentSignature,
           "distance_function: crossing does not start in current fragment");
    acc = compose(p.transition(e.a, e.b), acc);
    steps.push_back(acc);
    cur = portal.half[1 - e.b].fragment;
  }
  if (cur != edge.fragment)
    fail(ErrorKind::IncoherentSignature,
         "distance_function: signature does not reach the edge's fragment");

  // Gates in the final plane: the twin edge geometry after each crossing,
  // carried forward by the remaining transitions.
  std::vector<Segment> gates;
  for (size_t j = 0; j < suffix.size(); ++j) {
    const Portal& portal = p.portals()[suffix[j].a];
    const PortalEdgeRef& twin = portal.half[1 - suffix[j].b];
    Segment s = p.frag(twin.fragment).edge(twin.edge_index);
    Isometry to_final = compose(acc, steps[j].inverse());
    gates.push_back(to_final.apply_segment(s));
  }

  ApexedDistanceFunction f;
  f.edge = p.frag(edge.fragment).edge(edge.edge_index);
  f.apex = acc.apply(apex);
  f.offset = dist_to_last_vertex;
  f.signature = sig;
  f.domain = thread_gates(f.apex, gates, f.edge);
  if (f.domain.empty())
    fail(ErrorKind::EmptyInterval,
         "distance_function: signature admits no straight realization");
  return f;
}

double PathVisit::length() const {
  double l = 0.0;
  for (size_t i = 1; i < polyline.size(); ++i)
    l += dist(polyline[i - 1], polyline[i]);
  return l;
}

// ---------------------------------------------------------------------------
// Oracle search
// ---------------------------------------------------------------------------

namespace {

struct SearchState {
  int frag = 0;  // triangulation fragment id
  Point apex;
  double offset = 0.0;
  bool has_gate = false;
  Segment gate;  // current window, as a sub-segment in this plane
  int parent = -1;
  enum class Link { Start, Cross, Restart } link = Link::Start;
  int portal = -1, from_half = -1;           // Cross
  std::pair<int, int> corner{-1, -1};        // Restart: member entered
  std::pair<int, int> parent_corner{-1, -1}; // Restart: corner seen by parent
  Isometry step;                             // parent plane -> this plane
  int depth = 0;
  double lb = 0.0;
};

struct Candidate {
  double length = 0.0;
  int state = -1;
  std::pair<int, int> corner{-1, -1};  // target corner reached
};

struct ClassInfo {
  double angle = 0.0;
  bool boundary = false;
  bool bendable = false;
  int orig_class = -1;
};

double corner_angle(const Fragment& f, int v) {
  int n = f.size();
  Point a = f.vertices[(v + n - 1) % n] - f.vertices[v];
  Point b = f.vertices[(v + 1) % n] - f.vertices[v];
  double c = dot(a, b) / (norm(a) * norm(b));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

std::vector<ClassInfo> analyze_classes(const Triangulation& tri,
                                       const Portalgon& orig) {
  const Portalgon& P = tri.portalgon;
  std::vector<ClassInfo> info(P.vertex_class_count());
  for (int cls = 0; cls < P.vertex_class_count(); ++cls) {
    for (auto& [fid, v] : P.vertex_class_members(cls)) {
      const Fragment& f = P.frag(fid);
      info[cls].angle += corner_angle(f, v);
      int n = f.size();
      int e_prev = (v + n - 1) % n;
      if (!P.is_portal_edge({fid, v}) || !P.is_portal_edge({fid, e_prev}))
        info[cls].boundary = true;
      // Original vertex class: match by source fragment and position.
      if (info[cls].orig_class < 0) {
        int src = tri.source_of(fid);
        const Fragment& of = orig.frag(src);
        double tol = kEpsRel * std::max(1.0, of.diameter());
        for (int ov = 0; ov < of.size(); ++ov)
          if (dist(of.vertices[ov], f.vertices[v]) <= tol) {
            info[cls].orig_class = orig.vertex_class(src, ov);
            break;
          }
      }
    }
    if (info[cls].boundary)
      info[cls].bendable = info[cls].angle > M_PI - 1e-9;
    else
      info[cls].bendable = info[cls].angle > 2.0 * M_PI + 1e-9;
  }
  return info;
}

struct OracleRun {
  const Portalgon& orig;
  Triangulation tri;
  std::vector<ClassInfo> classes;
  std::vector<SearchState> arena;
  long expansions = 0;

  double scale() const { return std::max(1.0, tri.portalgon.scale()); }
};

GeodesicPath reconstruct(const OracleRun& run, const Candidate& cand) {
  const Portalgon& P = run.tri.portalgon;
  // Chain of states from the start to the final one.
  std::vector<int> chain;
  for (int i = cand.state; i >= 0; i = run.arena[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());

  // Walk backwards computing each state's [entry, exit] piece.
  int k = (int)chain.size();
  std::vector<std::pair<Point, Point>> piece(k);
  Point x = P.frag(cand.corner.first).vertices[cand.corner.second];
  for (int i = k - 1; i >= 0; --i) {
    const SearchState& st = run.arena[chain[i]];
    Point entry;
    if (st.link == SearchState::Link::Cross) {
      // Crossing point: the straight segment from the unfolded apex to x
      // meets the entry gate's supporting line.
      Segment g = st.gate;
      auto hit = line_line(st.apex, x - st.apex, g.a, g.dir());
      if (hit)
        entry = g.at(std::clamp(hit->second, 0.0, 1.0));
      else
        entry = g.at(0.5);  // degenerate: segment runs along the gate
    } else {
      entry = st.apex;  // Start and Restart begin at the apex itself
    }
    piece[i] = {entry, x};
    if (st.link == SearchState::Link::Cross) {
      x = st.step.inverse().apply(entry);
    } else if (st.link == SearchState::Link::Restart) {
      x = P.frag(st.parent_corner.first).vertices[st.parent_corner.second];
    }
  }

  GeodesicPath path;
  path.length = cand.length;

  // Signature in terms of the original portalgon.
  for (int i = 0; i < k; ++i) {
    const SearchState& st = run.arena[chain[i]];
    if (st.link == SearchState::Link::Cross) {
      int src = run.tri.portal_source[st.portal];
      if (src >= 0)
        path.signature.elements.push_back(
            SignatureElement::crossing(src, st.from_half));
    } else if (st.link == SearchState::Link::Restart) {
      int cls =
          P.vertex_class(st.corner.first, st.corner.second);
      if (run.classes[cls].orig_class >= 0)
        path.signature.elements.push_back(
            SignatureElement::vertex(run.classes[cls].orig_class));
    }
  }

  // Merge pieces into per-fragment components. All triangles of one source
  // fragment share its coordinate chart, so diagonal crossings and restarts
  // at the same chart position keep the component connected.
  double tol = kEpsRel * run.scale();
  for (int i = 0; i < k; ++i) {
    const SearchState& st = run.arena[chain[i]];
    int src = run.tri.source_of(st.frag);
    bool merge = false;
    if (!path.visits.empty() && i > 0) {
      if (st.link == SearchState::Link::Cross) {
        merge = run.tri.portal_source[st.portal] < 0;
      } else if (st.link == SearchState::Link::Restart) {
        const SearchState& prev = run.arena[chain[i - 1]];
        int prev_src = run.tri.source_of(prev.frag);
        merge = prev_src == src && points_close(piece[i].first,
                                                piece[i - 1].second, run.scale());
      }
    }
    if (merge && path.visits.back().fragment == src) {
      if (!points_close(path.visits.back().polyline.back(), piece[i].second,
                        run.scale()))
        path.visits.back().polyline.push_back(piece[i].second);
    } else {
      PathVisit v;
      v.fragment = src;
      v.polyline = {piece[i].first};
      if (!points_close(piece[i].first, piece[i].second, run.scale()))
        v.polyline.push_back(piece[i].second);
      path.visits.push_back(std::move(v));
    }
  }
  // Drop zero-length singleton visits (vertex touches).
  std::vector<PathVisit> kept;
  for (PathVisit& v : path.visits)
    if (v.polyline.size() >= 2 && v.length() > tol)
      kept.push_back(std::move(v));
  if (kept.empty() && !path.visits.empty())
    kept.push_back(path.visits.front());  // degenerate s == t
  path.visits = std::move(kept);
  return path;
}

}  // namespace

OracleResult oracle_shortest_path_bounded(const Portalgon& p,
                                          const SurfacePoint& s,
                                          const SurfacePoint& t,
                                          const SearchBudget& budget) {
  OracleRun run{p, triangulate(p, {s, t}), {}, {}, 0};
  const Portalgon& P = run.tri.portalgon;
  run.classes = analyze_classes(run.tri, p);

  auto [sf, sv] = run.tri.extra_vertex_at[0];
  auto [tf, tv] = run.tri.extra_vertex_at[1];
  int s_class = P.vertex_class(sf, sv);
  int t_class = P.vertex_class(tf, tv);

  int max_len = budget.max_signature_length > 0
                    ? budget.max_signature_length
                    : 64 + 16 * (int)p.portals().size();

  double tie = 1e-11 * run.scale();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Candidate> cands;

  using QEntry = std::pair<double, int>;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> queue;

  // Dominance pruning. A crossing state is subsumed by an earlier one with
  // the same unfolded apex, no larger offset, and a window containing the
  // new one: walks that loop around a flat vertex come back to an identical
  // placement with a narrower window and would otherwise multiply forever.
  std::map<int, std::vector<int>> by_frag;
  double sc = run.scale();
  auto dominated = [&](const SearchState& st) {
    auto it = by_frag.find(st.frag);
    if (it == by_frag.end()) return false;
    for (int oi : it->second) {
      const SearchState& old = run.arena[oi];
      if (old.has_gate != st.has_gate) continue;
      if (old.offset > st.offset + 1e-12 * sc) continue;
      if (!points_close(old.apex, st.apex, sc)) continue;
      if (!st.has_gate) {
        if (points_close(old.gate.a, st.gate.a, sc)) return true;  // corner
        continue;
      }
      // Same supporting line and containment of the window span.
      double len2 = std::max(norm2(old.gate.dir()), 1e-300);
      double tol = kEpsRel * std::max(1.0, sc);
      if (std::abs(cross(old.gate.dir(), st.gate.a - old.gate.a)) /
              std::sqrt(len2) > tol ||
          std::abs(cross(old.gate.dir(), st.gate.b - old.gate.a)) /
              std::sqrt(len2) > tol)
        continue;
      double ta = dot(st.gate.a - old.gate.a, old.gate.dir()) / len2;
      double tb = dot(st.gate.b - old.gate.a, old.gate.dir()) / len2;
      double ptol = 1e-7;
      if (ta >= -ptol && ta <= 1.0 + ptol && tb >= -ptol && tb <= 1.0 + ptol)
        return true;
    }
    return false;
  };

  auto push_state = [&](SearchState st) {
    if (st.depth > max_len) return;
    if (st.lb > best + tie) return;
    if (st.link == SearchState::Link::Restart && !st.has_gate)
      st.gate.a = st.apex;  // corner key for the dominance check
    if (dominated(st)) return;
    run.arena.push_back(st);
    by_frag[st.frag].push_back((int)run.arena.size() - 1);
    queue.push({st.lb, (int)run.arena.size() - 1});
  };

  auto add_candidate = [&](double len, int state, std::pair<int, int> corner) {
    if (len > best + tie) return;
    if (len < best - tie) {
      best = len;
      std::erase_if(cands, [&](const Candidate& c) {
        return c.length > best + tie;
      });
    }
    cands.push_back({len, state, corner});
  };

  // Initial states: one per member corner of the source class.
  for (auto& [fid, v] : P.vertex_class_members(s_class)) {
    SearchState st;
    st.frag = fid;
    st.apex = P.frag(fid).vertices[v];
    st.offset = 0.0;
    st.link = SearchState::Link::Start;
    st.corner = {fid, v};
    st.lb = 0.0;
    push_state(st);
  }

  bool exhausted = false;
  while (!queue.empty()) {
    auto [lb, si] = queue.top();
    queue.pop();
    if (lb > best + tie) {
      exhausted = true;
      break;
    }
    if (run.expansions >= budget.max_expansions) break;
    ++run.expansions;

    // Copy: the arena may reallocate on push.
    SearchState st = run.arena[si];
    const Fragment& f = P.frag(st.frag);
    std::vector<Segment> gates;
    if (st.has_gate) gates.push_back(st.gate);

    // Target corners in this triangle.
    for (int v = 0; v < f.size(); ++v) {
      if (P.vertex_class(st.frag, v) != t_class) continue;
      Point pos = f.vertices[v];
      if (st.link != SearchState::Link::Cross && !st.has_gate &&
          st.corner.first == st.frag &&
          points_close(st.apex, pos, run.scale())) {
        add_candidate(st.offset, si, {st.frag, v});
        continue;
      }
      if (threads_to_point(st.apex, gates, pos))
        add_candidate(st.offset + dist(st.apex, pos), si, {st.frag, v});
    }

    // Vertex restarts at bend-capable corners. Consecutive restarts within
    // one class would spin forever at zero cost, so forbid them; a single
    // restart already fans out to every member of the class.
    int own_class = st.link == SearchState::Link::Cross
                        ? -1
                        : P.vertex_class(st.corner.first, st.corner.second);
    for (int v = 0; v < f.size(); ++v) {
      int cls = P.vertex_class(st.frag, v);
      if (!run.classes[cls].bendable) continue;
      if (cls == own_class) continue;
      Point pos = f.vertices[v];
      if (!st.has_gate && points_close(st.apex, pos, run.scale())) continue;
      if (!threads_to_point(st.apex, gates, pos)) continue;
      double off = st.offset + dist(st.apex, pos);
      for (auto& [fid2, v2] : P.vertex_class_members(cls)) {
        SearchState ch;
        ch.frag = fid2;
        ch.apex = P.frag(fid2).vertices[v2];
        ch.offset = off;
        ch.parent = si;
        ch.link = SearchState::Link::Restart;
        ch.corner = {fid2, v2};
        ch.parent_corner = {st.frag, v};
        ch.depth = st.depth + 1;
        ch.lb = off;
        push_state(ch);
      }
    }

    // Crossings into neighbor triangles.
    bool from_corner = !st.has_gate;
    for (int e = 0; e < f.size(); ++e) {
      auto pa = P.portal_at({st.frag, e});
      if (!pa) continue;
      // Skip edges incident to the apex corner: those continuations are
      // covered by the sibling restart states of the same class.
      if (from_corner) {
        int v = st.corner.second;
        int n = f.size();
        if (e == v || e == (v + n - 1) % n) continue;
      }
      Segment edge_seg = f.edge(e);
      Interval J = thread_gates(st.apex, gates, edge_seg);
      if (J.empty() || J.width() < 0.0) continue;
      const Portal& portal = P.portals()[pa->first];
      int h = pa->second;
      // Do not cross straight back through the entry portal.
      if (st.link == SearchState::Link::Cross && pa->first == st.portal &&
          h != st.from_half)
        continue;
      Isometry T = P.transition(pa->first, h);
      SearchState ch;
      ch.frag = portal.half[1 - h].fragment;
      ch.apex = T.apply(st.apex);
      ch.offset = st.offset;
      ch.has_gate = true;
      ch.gate = {T.apply(edge_seg.at(J.lo)), T.apply(edge_seg.at(J.hi))};
      ch.parent = si;
      ch.link = SearchState::Link::Cross;
      ch.portal = pa->first;
      ch.from_half = h;
      ch.step = T;
      ch.depth = st.depth + 1;
      ch.lb = ch.offset + point_segment_distance(ch.apex, ch.gate);
      push_state(ch);
    }
  }
  if (queue.empty()) exhausted = true;

  OracleResult res;
  res.expansions = run.expansions;
  res.complete = exhausted && !cands.empty();
  if (cands.empty()) {
    res.path.length = std::numeric_limits<double>::infinity();
    res.complete = false;
    return res;
  }

  // Minimum length, then minimum complexity, then lexicographic signature.
  std::vector<std::pair<GeodesicPath, Candidate>> finalists;
  for (const Candidate& c : cands)
    if (c.length <= best + tie)
      finalists.push_back({reconstruct(run, c), c});
  std::sort(finalists.begin(), finalists.end(),
            [&](const auto& a, const auto& b) {
              if (std::abs(a.second.length - b.second.length) > tie)
                return a.second.length < b.second.length;
              size_t ca = a.first.signature.elements.size();
              size_t cb = b.first.signature.elements.size();
              if (ca != cb) return ca < cb;
              return a.first.signature < b.first.signature;
            });
  res.path = finalists.front().first;
  return res;
}

GeodesicPath oracle_shortest_path(const Portalgon& p, const SurfacePoint& s,
                                  const SurfacePoint& t,
                                  const SearchBudget& budget) {
  OracleResult r = oracle_shortest_path_bounded(p, s, t, budget);
  if (!r.complete)
    fail(ErrorKind::BudgetExceeded,
         "oracle_shortest_path: search budget exhausted");
  return r.path;
}

std::map<int, int> crossing_profile(const GeodesicPath& path) {
  std::map<int, int> counts;
  for (const PathVisit& v : path.visits) counts[v.fragment]++;
  return counts;
}

SurfacePoint random_surface_point(const Portalgon& p, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> areas;
  double total = 0.0;
  for (const Fragment& f : p.fragments()) {
    total += polygon_signed_area(f.vertices);
    areas.push_back(total);
  }
  std::uniform_real_distribution<double> pick(0.0, total);
  double r = pick(rng);
  size_t fi = std::lower_bound(areas.begin(), areas.end(), r) - areas.begin();
  fi = std::min(fi, p.fragments().size() - 1);
  const Fragment& f = p.fragments()[fi];
  double xlo = f.vertices[0].x, xhi = xlo, ylo = f.vertices[0].y, yhi = ylo;
  for (const Point& q : f.vertices) {
    xlo = std::min(xlo, q.x);
    xhi = std::max(xhi, q.x);
    ylo = std::min(ylo, q.y);
    yhi = std::max(yhi, q.y);
  }
  std::uniform_real_distribution<double> ux(xlo, xhi), uy(ylo, yhi);
  for (int tries = 0; tries < 10000; ++tries) {
    Point q{ux(rng), uy(rng)};
    // Keep clear of the boundary so sampled points are unambiguous.
    double margin = 1e-6 * std::max(1.0, f.diameter());
    bool clear = point_in_polygon(q, f.vertices, 0.0);
    for (int e = 0; clear && e < f.size(); ++e)
      if (point_segment_distance(q, f.edge(e)) < margin) clear = false;
    if (clear) return {f.id, q, {}};
  }
  return {f.id, f.centroid(), {}};
}

}  // namespace portalgon
