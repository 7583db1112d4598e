#include "portalgon/model.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>

namespace portalgon {

double Fragment::diameter() const {
  double d = 0.0;
  for (size_t i = 0; i < vertices.size(); ++i)
    for (size_t j = i + 1; j < vertices.size(); ++j)
      d = std::max(d, dist(vertices[i], vertices[j]));
  return d;
}

Point Fragment::centroid() const {
  // Area centroid of the polygon.
  double a2 = 0.0;
  Point c{0.0, 0.0};
  int n = size();
  for (int i = 0; i < n; ++i) {
    Point p = vertices[i], q = vertices[(i + 1) % n];
    double w = cross(p, q);
    a2 += w;
    c = c + w * (p + q);
  }
  if (std::abs(a2) < 1e-300) return vertices[0];
  return c / (3.0 * a2);
}

std::vector<int> FragmentGraph::degree() const {
  std::map<int, int> idx;
  for (size_t i = 0; i < nodes.size(); ++i) idx[nodes[i]] = (int)i;
  std::vector<int> deg(nodes.size(), 0);
  for (auto& [a, b] : links) {
    deg[idx.at(a)]++;
    deg[idx.at(b)]++;
  }
  return deg;
}

int FragmentGraph::independent_cycles() const {
  // links - nodes + number of connected components
  std::map<int, int> comp;
  int next = 0;
  for (int n : nodes) comp[n] = next++;
  // union-find over node labels
  std::vector<int> parent(next);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto& [a, b] : links) {
    int ra = find(comp.at(a)), rb = find(comp.at(b));
    if (ra != rb) parent[ra] = rb;
  }
  std::set<int> roots;
  for (int n : nodes) roots.insert(find(comp.at(n)));
  return (int)links.size() - (int)nodes.size() + (int)roots.size();
}

Portalgon::Portalgon(std::vector<Fragment> fragments,
                     std::vector<Portal> portals)
    : fragments_(std::move(fragments)), portals_(std::move(portals)) {
  rebuild_indexes();
}

void Portalgon::rebuild_indexes() {
  id_to_index_.clear();
  edge_to_portal_.clear();
  for (size_t i = 0; i < fragments_.size(); ++i)
    id_to_index_[fragments_[i].id] = (int)i;
  for (size_t pi = 0; pi < portals_.size(); ++pi)
    for (int h = 0; h < 2; ++h) {
      const PortalEdgeRef& r = portals_[pi].half[h];
      edge_to_portal_[{r.fragment, r.edge_index}] = {(int)pi, h};
    }

  // Vertex classes: union-find over (fragment, vertex) with portal endpoint
  // identifications.
  vertex_offset_.assign(fragments_.size() + 1, 0);
  for (size_t i = 0; i < fragments_.size(); ++i)
    vertex_offset_[i + 1] = vertex_offset_[i] + fragments_[i].size();
  int total = vertex_offset_.back();
  vertex_class_.resize(total);
  std::iota(vertex_class_.begin(), vertex_class_.end(), 0);
  auto flat = [&](int frag_id, int v) {
    return vertex_offset_[fragment_index(frag_id)] + v;
  };
  auto find = [&](int x) {
    while (vertex_class_[x] != x) x = vertex_class_[x] = vertex_class_[vertex_class_[x]];
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) vertex_class_[a] = b;
  };
  for (const Portal& p : portals_) {
    int s[2], e[2];
    for (int h = 0; h < 2; ++h) {
      const PortalEdgeRef& r = p.half[h];
      const Fragment& f = frag(r.fragment);
      int n = f.size();
      int a = r.edge_index, b = (r.edge_index + 1) % n;
      s[h] = flat(r.fragment, r.reversed ? b : a);
      e[h] = flat(r.fragment, r.reversed ? a : b);
    }
    unite(s[0], s[1]);
    unite(e[0], e[1]);
  }
  // Compact class labels and collect members.
  std::vector<int> root(total);
  for (int x = 0; x < total; ++x) root[x] = find(x);
  std::map<int, int> relabel;
  class_members_.clear();
  for (int x = 0; x < total; ++x) {
    auto [it, fresh] = relabel.try_emplace(root[x], (int)relabel.size());
    if (fresh) class_members_.emplace_back();
  }
  for (int x = 0; x < total; ++x) vertex_class_[x] = relabel.at(root[x]);
  class_count_ = (int)relabel.size();
  for (size_t fi = 0; fi < fragments_.size(); ++fi)
    for (int v = 0; v < fragments_[fi].size(); ++v)
      class_members_[vertex_class_[vertex_offset_[fi] + v]].push_back(
          {fragments_[fi].id, v});
}

const Fragment& Portalgon::frag(int id) const {
  return fragments_[fragment_index(id)];
}

int Portalgon::fragment_index(int id) const {
  auto it = id_to_index_.find(id);
  if (it == id_to_index_.end())
    fail(ErrorKind::InvalidPortalgon,
         "unknown fragment id " + std::to_string(id));
  return it->second;
}

int Portalgon::total_vertices() const {
  int n = 0;
  for (const Fragment& f : fragments_) n += f.size();
  return n;
}

double Portalgon::scale() const {
  double s = 0.0;
  for (const Fragment& f : fragments_) s = std::max(s, f.diameter());
  return s;
}

std::optional<std::pair<int, int>> Portalgon::portal_at(EdgeId e) const {
  auto it = edge_to_portal_.find(e);
  if (it == edge_to_portal_.end()) return std::nullopt;
  return it->second;
}

Segment Portalgon::directed_segment(const PortalEdgeRef& ref) const {
  Segment s = frag(ref.fragment).edge(ref.edge_index);
  if (ref.reversed) std::swap(s.a, s.b);
  return s;
}

Isometry Portalgon::transition(int portal_index, int from_half) const {
  const Portal& p = portals_[portal_index];
  const PortalEdgeRef& h1 = p.half[from_half];
  const PortalEdgeRef& h2 = p.half[1 - from_half];
  // Fragment interiors lie left of an unreversed directed edge, right of a
  // reversed one; crossing must land the two interiors on opposite sides,
  // which makes the map reflecting exactly when the flags agree.
  bool flip = (h1.reversed == h2.reversed);
  return glue_isometry(directed_segment(h1), directed_segment(h2), flip);
}

SurfacePoint Portalgon::twin_point(EdgeId e, double t_local) const {
  auto pa = portal_at(e);
  if (!pa) fail(ErrorKind::InvalidPortalgon, "twin_point: not a portal edge");
  const Portal& p = portals_[pa->first];
  const PortalEdgeRef& self = p.half[pa->second];
  const PortalEdgeRef& other = p.half[1 - pa->second];
  double td = directed_param(t_local, self.reversed);
  double t_other = local_param(td, other.reversed);
  Segment s = frag(other.fragment).edge(other.edge_index);
  SurfacePoint q;
  q.fragment = other.fragment;
  q.location = s.at(t_other);
  q.edge_param = {{other.edge_index, t_other}};
  return q;
}

int Portalgon::vertex_class(int fragment_id, int vertex_index) const {
  return vertex_class_[vertex_offset_[fragment_index(fragment_id)] +
                       vertex_index];
}

const std::vector<std::pair<int, int>>& Portalgon::vertex_class_members(
    int cls) const {
  return class_members_[cls];
}

std::vector<Violation> validate(const Portalgon& p) {
  std::vector<Violation> out;
  std::set<int> ids;
  for (const Fragment& f : p.fragments()) {
    if (!ids.insert(f.id).second)
      out.push_back({"DuplicateFragmentId", "fragment id reused", f.id, -1});
    if (f.size() < 3) {
      out.push_back({"TooFewVertices", "fragment needs >= 3 vertices", f.id, -1});
      continue;
    }
    double tol = kEpsRel * std::max(1.0, f.diameter());
    if (!polygon_is_simple(f.vertices, tol))
      out.push_back({"NotSimple", "fragment polygon self-intersects", f.id, -1});
    else if (polygon_signed_area(f.vertices) <= 0.0)
      out.push_back({"NotCCW", "fragment boundary not counterclockwise", f.id, -1});
  }
  if (!out.empty()) return out;  // portal checks assume sane fragments

  std::set<std::pair<int, int>> used_edges;
  int pi = 0;
  for (const Portal& portal : p.portals()) {
    bool ok = true;
    for (int h = 0; h < 2; ++h) {
      const PortalEdgeRef& r = portal.half[h];
      if (!ids.count(r.fragment)) {
        out.push_back({"BadFragmentRef", "portal references missing fragment",
                       r.fragment, pi});
        ok = false;
        continue;
      }
      if (r.edge_index < 0 || r.edge_index >= p.frag(r.fragment).size()) {
        out.push_back({"BadEdgeIndex", "edge index out of range", r.fragment, pi});
        ok = false;
      }
    }
    if (ok) {
      const PortalEdgeRef& a = portal.half[0];
      const PortalEdgeRef& b = portal.half[1];
      if (a.fragment == b.fragment && a.edge_index == b.edge_index)
        out.push_back({"SelfEdge", "portal glues an edge to itself",
                       a.fragment, pi});
      for (int h = 0; h < 2; ++h) {
        const PortalEdgeRef& r = portal.half[h];
        if (!used_edges.insert({r.fragment, r.edge_index}).second)
          out.push_back({"EdgeReused", "fragment edge appears in two portals",
                         r.fragment, pi});
      }
      double la = p.directed_segment(a).length();
      double lb = p.directed_segment(b).length();
      if (std::abs(la - lb) > kEpsRel * std::max({1.0, la, lb}))
        out.push_back({"LengthMismatch",
                       "portal edges have different lengths (" +
                           std::to_string(la) + " vs " + std::to_string(lb) + ")",
                       -1, pi});
    }
    ++pi;
  }
  if (p.total_vertices() < p.portal_edge_count())
    out.push_back({"TooManyPortals", "more portal edges than vertices", -1, -1});
  return out;
}

FragmentGraph fragment_graph(const Portalgon& p) {
  FragmentGraph g;
  for (const Fragment& f : p.fragments()) g.nodes.push_back(f.id);
  for (const Portal& portal : p.portals())
    g.links.push_back({portal.half[0].fragment, portal.half[1].fragment});
  return g;
}

ContainmentReport locate(const Portalgon& p, const SurfacePoint& q) {
  const Fragment& f = p.frag(q.fragment);
  double tol = kEpsRel * std::max(1.0, f.diameter());
  ContainmentReport rep;

  int n = f.size();
  for (int v = 0; v < n; ++v)
    if (dist(q.location, f.vertices[v]) <= tol) {
      rep.kind = ContainmentReport::Kind::Vertex;
      rep.vertex_index = v;
      rep.vertex_class = p.vertex_class(q.fragment, v);
      return rep;
    }
  for (int e = 0; e < n; ++e) {
    Segment s = f.edge(e);
    if (point_segment_distance(q.location, s) <= tol) {
      rep.kind = ContainmentReport::Kind::OnEdge;
      rep.edge_index = e;
      rep.t = std::clamp(dot(q.location - s.a, s.dir()) / norm2(s.dir()), 0.0, 1.0);
      if (p.is_portal_edge({q.fragment, e}))
        rep.twin = p.twin_point({q.fragment, e}, rep.t);
      return rep;
    }
  }
  if (!point_in_polygon(q.location, f.vertices, tol))
    fail(ErrorKind::NotOnSurface, "point lies outside its fragment");
  rep.kind = ContainmentReport::Kind::Interior;
  return rep;
}

namespace {

// Ear clipping; assumes a simple ccw polygon using original vertex indices.
// Returns triangles as index triples.
std::vector<std::array<int, 3>> ear_clip(const std::vector<Point>& pts) {
  int n = (int)pts.size();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::array<int, 3>> tris;
  double scale = 1.0;
  for (const Point& p : pts) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  double area_eps = kEpsDet * scale * scale;

  while ((int)idx.size() > 3) {
    bool clipped = false;
    int m = (int)idx.size();
    for (int k = 0; k < m; ++k) {
      int ia = idx[(k + m - 1) % m], ib = idx[k], ic = idx[(k + 1) % m];
      Point a = pts[ia], b = pts[ib], c = pts[ic];
      if (orient_det(a, b, c) <= area_eps) continue;  // reflex or flat
      bool empty = true;
      for (int j : idx) {
        if (j == ia || j == ib || j == ic) continue;
        Point q = pts[j];
        // Inside-or-on the closed triangle blocks the ear.
        double d1 = orient_det(a, b, q), d2 = orient_det(b, c, q),
               d3 = orient_det(c, a, q);
        if (d1 >= -area_eps && d2 >= -area_eps && d3 >= -area_eps) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + k);
      clipped = true;
      break;
    }
    if (!clipped)
      fail(ErrorKind::InvalidPortalgon, "triangulate: no ear found");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

struct Builder {
  std::vector<Fragment> frags;
  std::vector<int> source;            // per fragment: source fragment id
  std::vector<Portal> portals;
  std::vector<bool> diagonal;
  std::vector<int> psource;  // original portal index or -1
  int next_id = 0;

  int add_fragment(std::vector<Point> pts, int src) {
    Fragment f;
    f.id = next_id++;
    f.vertices = std::move(pts);
    frags.push_back(std::move(f));
    source.push_back(src);
    return frags.back().id;
  }
};

}  // namespace

std::vector<int> original_vertex_classes(const Triangulation& t,
                                         const Portalgon& original) {
  const Portalgon& P = t.portalgon;
  std::vector<int> out(P.vertex_class_count(), -1);
  for (int cls = 0; cls < P.vertex_class_count(); ++cls)
    for (auto& [fid, v] : P.vertex_class_members(cls)) {
      int src = t.source_of(fid);
      const Fragment& of = original.frag(src);
      double tol = kEpsRel * std::max(1.0, of.diameter());
      Point pos = P.frag(fid).vertices[v];
      for (int ov = 0; ov < of.size(); ++ov)
        if (dist(of.vertices[ov], pos) <= tol) {
          out[cls] = original.vertex_class(src, ov);
          break;
        }
      if (out[cls] >= 0) break;
    }
  return out;
}

Triangulation triangulate(const Portalgon& p,
                          const std::vector<SurfacePoint>& extra_vertices) {
  {
    auto v = validate(p);
    if (!v.empty())
      fail(ErrorKind::InvalidPortalgon,
           "triangulate: input fails validation: " + v.front().rule);
  }

  Builder b;
  // Map from original (fragment, edge) to the (fragment, edge) refs carrying
  // it in the triangulation; original edges are never split by ear clipping.
  std::map<std::pair<int, int>, std::pair<int, int>> edge_home;

  for (const Fragment& f : p.fragments()) {
    auto tris = ear_clip(f.vertices);
    int n = f.size();
    // Edge key by sorted original index pair -> (fragment, edge) of first
    // occurrence; second occurrence closes a diagonal portal.
    std::map<std::pair<int, int>, std::pair<int, int>> open_diag;
    for (auto& t : tris) {
      std::vector<Point> pts = {f.vertices[t[0]], f.vertices[t[1]],
                                f.vertices[t[2]]};
      int id = b.add_fragment(pts, f.id);
      for (int e = 0; e < 3; ++e) {
        int va = t[e], vb = t[(e + 1) % 3];
        if ((va + 1) % n == vb) {
          edge_home[{f.id, va}] = {id, e};  // original boundary edge va
          continue;
        }
        auto key = std::minmax(va, vb);
        auto it = open_diag.find({key.first, key.second});
        if (it == open_diag.end()) {
          open_diag[{key.first, key.second}] = {id, e};
        } else {
          // Directions: this edge runs va->vb, the stored one vb->va. Make
          // both directed refs run the same geometric way.
          Portal portal;
          portal.half[0] = {it->second.first, it->second.second, true};
          portal.half[1] = {id, e, false};
          // half[0] stored direction is vb->va when this one is va->vb, so
          // reversing half[0] aligns the parameters.
          b.portals.push_back(portal);
          b.diagonal.push_back(true);
          b.psource.push_back(-1);
          open_diag.erase(it);
        }
      }
    }
    if (!open_diag.empty())
      fail(ErrorKind::InvalidPortalgon, "triangulate: dangling diagonal");
  }

  // Re-create the original portals on the carried-over edges.
  for (const Portal& portal : p.portals()) {
    Portal np;
    for (int h = 0; h < 2; ++h) {
      const PortalEdgeRef& r = portal.half[h];
      auto home = edge_home.at({r.fragment, r.edge_index});
      np.half[h] = {home.first, home.second, r.reversed};
    }
    b.portals.push_back(np);
    b.diagonal.push_back(false);
    b.psource.push_back((int)(&portal - p.portals().data()));
  }

  Portalgon tri(b.frags, b.portals);

  // Insert the extra vertices (triangle split / edge split). Fragments can
  // be replaced by later splits, so record positions and resolve them to
  // (fragment, vertex) pairs at the end.
  std::vector<std::pair<int, Point>> extra_pos;  // (source fragment, position)
  for (const SurfacePoint& sp0 : extra_vertices) {
    // Find a triangle of the source fragment containing the point.
    SurfacePoint sp;
    sp.location = sp0.location;
    sp.fragment = -1;
    for (const Fragment& f : tri.fragments()) {
      if (b.source[tri.fragment_index(f.id)] != sp0.fragment) continue;
      double tol = kEpsRel * std::max(1.0, f.diameter());
      if (point_in_polygon(sp0.location, f.vertices, tol)) {
        sp.fragment = f.id;
        break;
      }
    }
    if (sp.fragment < 0)
      fail(ErrorKind::NotOnSurface, "triangulate: extra vertex not on surface");

    ContainmentReport rep = locate(tri, sp);
    if (rep.kind == ContainmentReport::Kind::Vertex) {
      extra_pos.push_back(
          {sp0.fragment,
           tri.frag(sp.fragment).vertices[rep.vertex_index]});
      continue;
    }

    auto frags = tri.fragments();
    auto portals = tri.portals();
    auto index_of = [&](int fid) {
      for (size_t i = 0; i < frags.size(); ++i)
        if (frags[i].id == fid) return (int)i;
      fail(ErrorKind::InvalidPortalgon, "triangulate: lost fragment");
    };
    auto split_triangle_interior = [&](int fid, Point q) {
      // Replace triangle fid by three triangles around q.
      int idx = index_of(fid);
      Fragment f = frags[idx];
      int base = b.next_id;
      std::vector<Fragment> three;
      for (int e = 0; e < 3; ++e) {
        Fragment nf;
        nf.id = base + e;
        nf.vertices = {f.vertices[e], f.vertices[(e + 1) % 3], q};
        three.push_back(nf);
      }
      b.next_id += 3;
      // Rewire portals touching f's edges.
      for (auto& portal : portals)
        for (int h = 0; h < 2; ++h)
          if (portal.half[h].fragment == fid) {
            portal.half[h].fragment = base + portal.half[h].edge_index;
            portal.half[h].edge_index = 0;
          }
      // Spokes between consecutive pieces: piece e edge1 = (v_{e+1}, q),
      // piece e+1 edge2 = (q, v_{e+1}).
      for (int e = 0; e < 3; ++e) {
        Portal np;
        np.half[0] = {base + e, 1, false};            // v_{e+1} -> q
        np.half[1] = {base + (e + 1) % 3, 2, true};   // reversed (q -> v_{e+1})
        portals.push_back(np);
        b.diagonal.push_back(true);
        b.psource.push_back(-1);
      }
      int src = b.source[idx];
      frags.erase(frags.begin() + idx);
      b.source.erase(b.source.begin() + idx);
      for (auto& nf : three) {
        frags.push_back(nf);
        b.source.push_back(src);
      }
      return base;  // q is vertex 2 of each piece
    };

    auto split_edge = [&](int fid, int eidx, double t) {
      // Split triangle fid along the cevian from the opposite corner to the
      // point at parameter t of edge eidx. Returns ids of the two pieces
      // (left: contains edge start, right: contains edge end) and the new
      // point. Portal rewiring for the split edge is handled by the caller.
      int idx = index_of(fid);
      Fragment f = frags[idx];
      Point q = f.edge(eidx).at(t);
      int a = eidx, c = (eidx + 1) % 3, o = (eidx + 2) % 3;
      int base = b.next_id;
      b.next_id += 2;
      Fragment left, right;
      left.id = base;
      left.vertices = {f.vertices[a], q, f.vertices[o]};
      right.id = base + 1;
      right.vertices = {q, f.vertices[c], f.vertices[o]};
      // Rewire the two untouched edges of f: edge c (c->o) now right edge 1,
      // edge o (o->a) now left edge 2.
      for (auto& portal : portals)
        for (int h = 0; h < 2; ++h) {
          auto& r = portal.half[h];
          if (r.fragment != fid) continue;
          if (r.edge_index == (eidx + 1) % 3) r = {base + 1, 1, r.reversed};
          else if (r.edge_index == (eidx + 2) % 3) r = {base, 2, r.reversed};
          // the split edge itself is rewired by the caller
        }
      // Cevian portal between the pieces: left edge 1 (q->o) and right edge 2
      // (o->q).
      Portal np;
      np.half[0] = {base, 1, false};
      np.half[1] = {base + 1, 2, true};
      portals.push_back(np);
      b.diagonal.push_back(true);
      b.psource.push_back(-1);
      int src = b.source[idx];
      frags.erase(frags.begin() + idx);
      b.source.erase(b.source.begin() + idx);
      frags.push_back(left);
      b.source.push_back(src);
      frags.push_back(right);
      b.source.push_back(src);
      return std::make_pair(base, base + 1);
    };

    if (rep.kind == ContainmentReport::Kind::Interior) {
      split_triangle_interior(sp.fragment, sp.location);
      tri = Portalgon(frags, portals);
      extra_pos.push_back({sp0.fragment, sp.location});
    } else {
      // On an edge: split this triangle and, for portals, the twin triangle.
      EdgeId e{sp.fragment, rep.edge_index};
      auto pa = tri.portal_at(e);
      if (!pa) {
        Point q = tri.frag(sp.fragment).edge(rep.edge_index).at(rep.t);
        split_edge(sp.fragment, rep.edge_index, rep.t);
        tri = Portalgon(frags, portals);
        extra_pos.push_back({sp0.fragment, q});
      } else {
        Portal portal = portals[pa->first];
        const PortalEdgeRef self = portal.half[pa->second];
        const PortalEdgeRef other = portal.half[1 - pa->second];
        Point qpos = tri.frag(self.fragment).edge(self.edge_index).at(rep.t);
        if (self.fragment == other.fragment)
          fail(ErrorKind::InvalidPortalgon,
               "triangulate: vertex insertion on a self-glued triangle edge "
               "is not supported");
        double td = directed_param(rep.t, self.reversed);
        double t_other = local_param(td, other.reversed);
        bool was_diag = b.diagonal[pa->first];
        int was_src = b.psource[pa->first];
        // Remove the old portal, split both sides, then add the two pieces.
        portals.erase(portals.begin() + pa->first);
        b.diagonal.erase(b.diagonal.begin() + pa->first);
        b.psource.erase(b.psource.begin() + pa->first);
        auto p1 = split_edge(self.fragment, self.edge_index, rep.t);
        auto p2 = split_edge(other.fragment, other.edge_index, t_other);
        // Piece edges: left piece edge 0 = first part, right piece edge 0 =
        // second part (in local direction). Match directed halves.
        // Directed first half of self = local first part if !reversed.
        PortalEdgeRef sa{self.reversed ? p1.second : p1.first, 0, self.reversed};
        PortalEdgeRef sb{self.reversed ? p1.first : p1.second, 0, self.reversed};
        PortalEdgeRef oa{other.reversed ? p2.second : p2.first, 0, other.reversed};
        PortalEdgeRef ob{other.reversed ? p2.first : p2.second, 0, other.reversed};
        portals.push_back({{sa, oa}});
        b.diagonal.push_back(was_diag);
        b.psource.push_back(was_src);
        portals.push_back({{sb, ob}});
        b.diagonal.push_back(was_diag);
        b.psource.push_back(was_src);
        tri = Portalgon(frags, portals);
        extra_pos.push_back({sp0.fragment, qpos});
      }
    }
  }

  // Enforce that any two triangles share at most one edge (and none with
  // itself): split an offender through its centroid into three.
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int, int>, int> pair_count;
    int offender = -1;
    for (const Portal& portal : tri.portals()) {
      int a = portal.half[0].fragment, c = portal.half[1].fragment;
      auto key = std::minmax(a, c);
      if (a == c || ++pair_count[{key.first, key.second}] > 1) {
        offender = a;
        break;
      }
    }
    if (offender < 0) break;

    auto frags = tri.fragments();
    auto portals = tri.portals();
    int idx = tri.fragment_index(offender);
    Fragment f = frags[idx];
    Point q = f.centroid();
    int base = b.next_id;
    b.next_id += 3;
    std::vector<Fragment> three;
    for (int e = 0; e < 3; ++e) {
      Fragment nf;
      nf.id = base + e;
      nf.vertices = {f.vertices[e], f.vertices[(e + 1) % 3], q};
      three.push_back(nf);
    }
    for (auto& portal : portals)
      for (int h = 0; h < 2; ++h)
        if (portal.half[h].fragment == offender) {
          portal.half[h].fragment = base + portal.half[h].edge_index;
          portal.half[h].edge_index = 0;
        }
    for (int e = 0; e < 3; ++e) {
      Portal np;
      np.half[0] = {base + e, 1, false};
      np.half[1] = {base + (e + 1) % 3, 2, true};
      portals.push_back(np);
      b.diagonal.push_back(true);
      b.psource.push_back(-1);
    }
    int src = b.source[idx];
    frags.erase(frags.begin() + idx);
    b.source.erase(b.source.begin() + idx);
    for (auto& nf : three) {
      frags.push_back(nf);
      b.source.push_back(src);
    }
    tri = Portalgon(frags, portals);
    changed = true;
  }

  // Resolve the recorded extra-vertex positions against the final mesh.
  std::vector<std::pair<int, int>> extra_at;
  for (auto& [src_frag, pos] : extra_pos) {
    bool found = false;
    for (const Fragment& f : tri.fragments()) {
      if (b.source[tri.fragment_index(f.id)] != src_frag) continue;
      double tol = kEpsRel * std::max(1.0, f.diameter());
      for (int v = 0; v < f.size() && !found; ++v)
        if (dist(f.vertices[v], pos) <= tol) {
          extra_at.push_back({f.id, v});
          found = true;
        }
      if (found) break;
    }
    if (!found)
      fail(ErrorKind::InvalidPortalgon, "triangulate: lost an extra vertex");
  }

  Triangulation out;
  out.portalgon = tri;
  out.source_fragment = b.source;
  out.portal_is_diagonal = b.diagonal;
  out.portal_source = b.psource;
  out.extra_vertex_at = extra_at;
  return out;
}

}  // namespace portalgon
