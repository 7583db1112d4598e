#include "portalgon/spm.hpp"

#include <cmath>
#include <queue>
#include <set>
#include <tuple>

namespace portalgon {

namespace {

constexpr double kValTolAbs = 1e-9;

double val_tol(double v) { return kValTolAbs * std::max(1.0, std::abs(v)); }

struct Event {
  double delta = 0.0;
  int kind = 0;  // 0 = function minimum, 1 = envelope vertex, 2 = crossing
  int edge = -1;
  int fa = -1, fb = -1;
  double t = 0.0;

  friend bool operator>(const Event& x, const Event& y) {
    if (x.delta != y.delta) return x.delta > y.delta;
    if (x.kind != y.kind) return x.kind > y.kind;
    if (x.edge != y.edge) return x.edge > y.edge;
    if (x.fa != y.fa) return x.fa > y.fa;
    return x.fb > y.fb;
  }
};

struct Engine {
  const Triangulation& tri;
  const Portalgon& P;
  double scale;
  int max_depth;

  std::vector<SweepEdgeInfo> edges;
  std::map<EdgeId, std::pair<int, int>> edge_of;
  std::vector<SpmFunction> fns;
  // Two envelopes per edge (side 0 / side 1); env id -> arena id per slot.
  std::vector<DynamicLowerEnvelope<ApexedCurve>> env;
  std::vector<std::vector<int>> env_fns;
  std::map<std::tuple<int, int, int, int, int, int, int>, int> dedup;
  std::vector<double> vdist;
  std::vector<int> vvia;
  std::vector<double> vhop;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::set<std::tuple<int, int, int, int, long>> scheduled;
  SpmCounters counters;
  std::vector<std::array<long, 2>> type_a_per_edge;
  double cur = 0.0;

  explicit Engine(const Triangulation& t)
      : tri(t), P(t.portalgon), scale(std::max(1.0, P.scale())) {
    max_depth = 64 + 16 * (int)P.portals().size();
    // Sweep edges: one per portal, one per boundary edge.
    for (size_t pi = 0; pi < P.portals().size(); ++pi) {
      SweepEdgeInfo info;
      info.boundary = false;
      info.portal = (int)pi;
      for (int h = 0; h < 2; ++h) {
        const PortalEdgeRef& r = P.portals()[pi].half[h];
        info.half[h] = {r.fragment, r.edge_index};
        edge_of[{r.fragment, r.edge_index}] = {(int)edges.size(), h};
      }
      info.length = P.directed_segment(P.portals()[pi].half[0]).length();
      edges.push_back(info);
    }
    for (const Fragment& f : P.fragments())
      for (int e = 0; e < f.size(); ++e) {
        if (P.is_portal_edge({f.id, e})) continue;
        SweepEdgeInfo info;
        info.boundary = true;
        info.half[0] = {f.id, e};
        info.half[1] = {-1, -1};
        info.length = f.edge(e).length();
        edge_of[{f.id, e}] = {(int)edges.size(), 0};
        edges.push_back(info);
      }
    env.resize(2 * edges.size());
    env_fns.resize(2 * edges.size());
    type_a_per_edge.assign(edges.size(), {0, 0});
    vdist.assign(P.vertex_class_count(),
                 std::numeric_limits<double>::infinity());
    vvia.assign(P.vertex_class_count(), -1);
    vhop.assign(P.vertex_class_count(), -1.0);
  }

  // Edge geometry in the plane of the given side, parameterized so that both
  // sides of a portal agree on the surface point at each t.
  Segment side_segment(int e, int side) const {
    const SweepEdgeInfo& info = edges[e];
    if (info.boundary)
      return P.frag(info.half[0].fragment).edge(info.half[0].edge_index);
    return P.directed_segment(P.portals()[info.portal].half[side]);
  }

  int fragment_of(int e, int side) const {
    return edges[e].half[side].fragment;
  }

  void schedule(Event ev) {
    if (!std::isfinite(ev.delta)) return;
    ev.delta = std::max(ev.delta, cur);
    long key = (long)std::llround(ev.delta / (1e-12 * scale));
    if (!scheduled.insert({ev.kind, ev.edge, ev.fa, ev.fb, key}).second)
      return;
    queue.push(ev);
  }

  int insert_fn(int e, int side, Point apex, double offset,
                const std::optional<Segment>& gate, int pred,
                SignatureElement elem, double hop_t,
                const Isometry& from_pred, int depth, int member_tag) {
    if (depth > max_depth) return -1;
    auto key = std::make_tuple(e, side, pred, (int)elem.kind, elem.a, elem.b,
                               member_tag);
    auto it = dedup.find(key);
    if (it != dedup.end() &&
        fns[it->second].fn.offset <= offset + 1e-12 * scale)
      return -1;

    SpmFunction f;
    f.edge = e;
    f.side = side;
    f.fragment = fragment_of(e, side);
    f.fn.edge = side_segment(e, side);
    f.fn.apex = apex;
    f.fn.offset = offset;
    std::vector<Segment> gates;
    if (gate) gates.push_back(*gate);
    f.fn.domain = thread_gates(apex, gates, f.fn.edge);
    if (f.fn.domain.empty()) return -1;
    if (gate) {
      f.gate = *gate;
      f.has_gate = true;
    }
    f.pred = pred;
    f.elem = elem;
    f.hop_t = hop_t;
    f.from_pred = from_pred;
    f.depth = depth;
    f.id = (int)fns.size();
    fns.push_back(f);
    dedup[key] = f.id;
    counters.functions += 1;

    int slot = 2 * e + side;
    int env_id = env[slot].insert(ApexedCurve{fns.back().fn});
    fns.back().env_id = env_id;
    env_fns[slot].push_back(f.id);

    // Type-a event at the function's constrained minimum.
    schedule({fns.back().fn.min_value(), 0, e, f.id, -1,
              fns.back().fn.min_param()});
    // Late insertion: the function may already pierce the sweep line; its
    // intersections enter the sweep order and trigger local re-checks.
    if (cur > 0.0 && fns.back().fn.min_value() < cur) refresh_crossings(e);
    return f.id;
  }

  std::vector<double> sweep_crossings(const SpmFunction& f,
                                      double delta) const {
    std::vector<double> out;
    if (delta < f.fn.offset) return out;
    Point d = f.fn.edge.dir();
    double len2 = norm2(d);
    if (len2 <= 0.0) return out;
    double t0 = dot(f.fn.apex - f.fn.edge.a, d) / len2;
    double h2 = norm2(f.fn.apex - f.fn.edge.at(t0));
    double rhs = (delta - f.fn.offset) * (delta - f.fn.offset) - h2;
    if (rhs < 0.0) return out;
    double w = std::sqrt(rhs / len2);
    for (double t : {t0 - w, t0 + w})
      if (f.fn.domain.contains(t, 1e-9)) out.push_back(t);
    return out;
  }

  // Rebuild the sweep-line order on edge e and create crossing events for
  // neighboring functions from opposite sides.
  void refresh_crossings(int e) {
    struct At {
      double t;
      int fn;
    };
    std::vector<At> at;
    for (int side = 0; side < 2; ++side)
      for (int id : env_fns[2 * e + side])
        for (double t : sweep_crossings(fns[id], cur + 1e-12 * scale))
          at.push_back({t, id});
    std::sort(at.begin(), at.end(),
              [](const At& a, const At& b) { return a.t < b.t; });
    for (size_t i = 0; i + 1 < at.size(); ++i) {
      const SpmFunction& fa = fns[at[i].fn];
      const SpmFunction& fb = fns[at[i + 1].fn];
      if (fa.side == fb.side || fa.id == fb.id) continue;
      for (double t : apexed_intersections(fa.fn, fb.fn)) {
        if (!fa.fn.domain.contains(t, 1e-9) ||
            !fb.fn.domain.contains(t, 1e-9))
          continue;
        double v = fa.fn.value(t);
        if (v > cur - val_tol(v))
          schedule({v, 2, e, fa.id, fb.id, t});
      }
    }
  }

  double env_value(int e, double t) const {
    return std::min(env[2 * e].value_at(t), env[2 * e + 1].value_at(t));
  }

  // Propagate a signature that appears on the envelope of edge e across the
  // portal into the opposite triangle.
  void propagate(int fa) {
    SpmFunction& f = fns[fa];
    if (f.propagated) return;
    f.propagated = true;
    const SweepEdgeInfo& info = edges[f.edge];
    if (info.boundary) return;
    int other = 1 - f.side;
    int fy = info.half[other].fragment;
    Isometry T = P.transition(info.portal, f.side);
    Point apex = T.apply(f.fn.apex);
    Segment seg_y = side_segment(f.edge, other);
    Segment gate{seg_y.at(f.fn.domain.lo), seg_y.at(f.fn.domain.hi)};
    SignatureElement elem = SignatureElement::crossing(info.portal, f.side);
    const Fragment& frag = P.frag(fy);
    for (int e2 = 0; e2 < frag.size(); ++e2) {
      if (e2 == info.half[other].edge_index) continue;
      auto [se, sside] = edge_of.at({fy, e2});
      insert_fn(se, sside, apex, f.fn.offset, gate, fa, elem, -1.0, T,
                f.depth + 1, -1);
    }
  }

  void finalize_vertex(int cls, double d, int via, double hop) {
    if (d >= vdist[cls] - 1e-12 * scale) return;
    vdist[cls] = d;
    vvia[cls] = via;
    vhop[cls] = hop;
    for (auto& [fid, v] : P.vertex_class_members(cls)) {
      const Fragment& frag = P.frag(fid);
      Point pos = frag.vertices[v];
      for (int e2 = 0; e2 < frag.size(); ++e2) {
        auto [se, sside] = edge_of.at({fid, e2});
        int member_tag = P.fragment_index(fid) * 4 + v;
        insert_fn(se, sside, pos, d, std::nullopt, via,
                  SignatureElement::vertex(cls), hop, Isometry::identity(),
                  via >= 0 ? fns[via].depth + 1 : 0, member_tag);
      }
    }
  }

  void check_endpoints(int e) {
    for (int which = 0; which < 2; ++which) {
      double t = which == 0 ? 0.0 : 1.0;
      for (int side = 0; side < 2; ++side) {
        if (edges[e].boundary && side == 1) continue;
        int who = env[2 * e + side].realizing(t);
        if (who < 0) continue;
        int fa = env_fns[2 * e + side][who];
        double val = fns[fa].fn.value(t);
        // Vertex at this endpoint of the side fragment's edge.
        EdgeId h = edges[e].half[side];
        const Fragment& frag = P.frag(h.fragment);
        Segment seg = fns[fa].fn.edge;
        Point pos = seg.at(t);
        for (int v = 0; v < frag.size(); ++v)
          if (points_close(frag.vertices[v], pos, scale))
            finalize_vertex(P.vertex_class(h.fragment, v), val, fa, t);
      }
    }
  }

  // A point of edge e has been touched by an event at parameter t: check
  // for newly appearing functions and keep the vertex distances current.
  void handle_point(int e, double t) {
    for (double tt : {t - 1e-9, t, t + 1e-9}) {
      if (tt < 0.0 || tt > 1.0) continue;
      int who[2] = {-1, -1};
      double val[2] = {std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
      for (int side = 0; side < 2; ++side) {
        int w = env[2 * e + side].realizing(tt);
        if (w < 0) continue;
        who[side] = env_fns[2 * e + side][w];
        val[side] = fns[who[side]].fn.value(tt);
      }
      double lo = std::min(val[0], val[1]);
      if (!std::isfinite(lo) || lo > cur + val_tol(lo)) continue;
      for (int side = 0; side < 2; ++side)
        if (who[side] >= 0 && val[side] <= lo + val_tol(lo) &&
            !fns[who[side]].propagated)
          propagate(who[side]);
    }
    check_endpoints(e);
  }

  void schedule_next_vertex(int fa, double q) {
    SpmFunction& f = fns[fa];
    int slot = 2 * f.edge + f.side;
    try {
      auto v = env[slot].next_vertex(f.env_id, q);
      if (v) schedule({v->value, 1, f.edge, fa, -1, v->t});
    } catch (const Error&) {
      // not on its envelope there; nothing to schedule
    }
  }

  void run(int source_class) {
    finalize_vertex(source_class, 0.0, -1, -1.0);
    int rounds = 0;
    while (true) {
      drain();
      if (!repair()) break;
      if (++rounds > 200)
        fail(ErrorKind::NumericalStall,
             "compute_edge_spm: propagation did not reach a fixpoint");
      counters.repair_rounds += 1;
    }
    for (auto& en : env) {
      counters.envelope_intervals_created += en.counters().intervals_created;
      counters.envelope_intervals_deleted += en.counters().intervals_deleted;
    }
  }

  void drain() {
    while (!queue.empty()) {
      Event ev = queue.top();
      queue.pop();
      if (ev.delta < cur - 1e-9 * scale)
        fail(ErrorKind::NumericalStall,
             "compute_edge_spm: event time regressed beyond tolerance");
      cur = std::max(cur, ev.delta);
      if (ev.kind == 0) {
        SpmFunction& f = fns[ev.fa];
        if (f.min_done) continue;
        f.min_done = true;
        counters.events_a += 1;
        type_a_per_edge[ev.edge][f.side] += 1;
        handle_point(ev.edge, ev.t);
        refresh_crossings(ev.edge);
        schedule_next_vertex(ev.fa, ev.t);
        // Pull the next pending minimum of this side's envelope.
        auto m = env[2 * ev.edge + f.side].next_local_minimum(ev.delta);
        if (m) {
          int fa = env_fns[2 * ev.edge + f.side][m->fn];
          if (!fns[fa].min_done) schedule({m->value, 0, ev.edge, fa, -1, m->t});
        }
      } else if (ev.kind == 1) {
        SpmFunction& f = fns[ev.fa];
        double v = f.fn.domain.contains(ev.t, 1e-9) ? f.fn.value(ev.t)
                                                    : ev.delta;
        double lvl = env[2 * ev.edge + f.side].value_at(ev.t);
        if (std::abs(v - lvl) > val_tol(v) &&
            std::abs(ev.delta - lvl) > val_tol(ev.delta))
          continue;  // stale vertex
        counters.events_b += 1;
        handle_point(ev.edge, ev.t);
        refresh_crossings(ev.edge);
        for (double q : {ev.t - 1e-9, ev.t + 1e-9}) {
          if (q < 0.0 || q > 1.0) continue;
          for (int side = 0; side < 2; ++side) {
            int w = env[2 * ev.edge + side].realizing(q);
            if (w >= 0) schedule_next_vertex(env_fns[2 * ev.edge + side][w], q);
          }
        }
      } else {
        const SpmFunction& fa = fns[ev.fa];
        const SpmFunction& fb = fns[ev.fb];
        double va = fa.fn.domain.contains(ev.t, 1e-9) ? fa.fn.value(ev.t)
                                                      : ev.delta;
        double vb = fb.fn.domain.contains(ev.t, 1e-9) ? fb.fn.value(ev.t)
                                                      : ev.delta;
        if (std::abs(va - vb) > val_tol(va)) continue;
        counters.events_c += 1;
        handle_point(ev.edge, ev.t);
        refresh_crossings(ev.edge);
      }
    }
  }

  // Final envelope of one edge as labeled intervals.
  std::vector<EdgeSpmInterval> assemble_edge(int e) const {
    struct Piece {
      double xlo, xhi;
      int fn;
    };
    std::vector<Piece> acc;
    for (int side = 0; side < 2; ++side) {
      std::vector<Piece> add;
      for (const EnvInterval& iv : env[2 * e + side].flatten())
        add.push_back({iv.xlo, iv.xhi, env_fns[2 * e + side][iv.fn]});
      if (acc.empty()) {
        acc = add;
        continue;
      }
      // Merge the two labeled lists by their pointwise minimum.
      std::vector<double> cuts;
      for (auto& p : acc) {
        cuts.push_back(p.xlo);
        cuts.push_back(p.xhi);
      }
      for (auto& p : add) {
        cuts.push_back(p.xlo);
        cuts.push_back(p.xhi);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      auto covering = [&](const std::vector<Piece>& list, double x) {
        for (auto& p : list)
          if (p.xlo <= x && x <= p.xhi) return p.fn;
        return -1;
      };
      std::vector<Piece> merged;
      auto emit = [&](double lo, double hi, int fn) {
        if (fn < 0 || hi < lo) return;
        if (!merged.empty() && merged.back().fn == fn &&
            merged.back().xhi >= lo - 1e-15)
          merged.back().xhi = hi;
        else
          merged.push_back({lo, hi, fn});
      };
      for (size_t ci = 0; ci + 1 < cuts.size(); ++ci) {
        double x0 = cuts[ci], x1 = cuts[ci + 1];
        double mid = 0.5 * (x0 + x1);
        int pa = covering(acc, mid), pb = covering(add, mid);
        if (pa < 0 && pb < 0) continue;
        if (pa < 0 || pb < 0) {
          emit(x0, x1, pa < 0 ? pb : pa);
          continue;
        }
        std::vector<double> xs = {x0};
        for (double tm : apexed_intersections(fns[pa].fn, fns[pb].fn))
          if (tm > x0 + 1e-14 && tm < x1 - 1e-14) xs.push_back(tm);
        xs.push_back(x1);
        std::sort(xs.begin(), xs.end());
        for (size_t k = 0; k + 1 < xs.size(); ++k) {
          double m = 0.5 * (xs[k] + xs[k + 1]);
          emit(xs[k], xs[k + 1],
               fns[pa].fn.value(m) <= fns[pb].fn.value(m) ? pa : pb);
        }
      }
      acc = merged;
    }
    std::vector<EdgeSpmInterval> out;
    for (auto& p : acc) out.push_back({{p.xlo, p.xhi}, p.fn});
    return out;
  }

  bool repair() {
    bool changed = false;
    size_t fn_count = fns.size();
    for (size_t e = 0; e < edges.size(); ++e) check_endpoints((int)e);
    if (fns.size() != fn_count) changed = true;
    for (size_t e = 0; e < edges.size(); ++e)
      for (const EdgeSpmInterval& iv : assemble_edge((int)e)) {
        if (!fns[iv.fn].propagated) {
          propagate(iv.fn);
          changed = true;
        }
      }
    if (fns.size() != fn_count) changed = true;
    cur = std::numeric_limits<double>::infinity();
    if (changed) cur = 0.0;  // new functions queued events from scratch
    return changed;
  }
};

}  // namespace

EdgeSPM compute_edge_spm(const Triangulation& t, const SurfacePoint& source) {
  ContainmentReport rep = locate(t.portalgon, source);
  if (rep.kind != ContainmentReport::Kind::Vertex)
    fail(ErrorKind::InvalidPortalgon,
         "compute_edge_spm: source must be a vertex of the triangulation");
  int cls = t.portalgon.vertex_class(source.fragment, rep.vertex_index);

  Engine engine(t);
  engine.run(cls);

  EdgeSPM out;
  out.edges = engine.edges;
  out.functions = engine.fns;
  out.vertex_distance = engine.vdist;
  out.counters = engine.counters;
  out.edge_index = engine.edge_of;
  out.type_a_per_edge = engine.type_a_per_edge;
  for (size_t e = 0; e < engine.edges.size(); ++e) {
    out.intervals.push_back(engine.assemble_edge((int)e));
    out.side_counts.push_back({(int)engine.env_fns[2 * e].size(),
                               (int)engine.env_fns[2 * e + 1].size()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interior extension
// ---------------------------------------------------------------------------

TriangleSPM extend_to_interior(const Triangulation& t, const EdgeSPM& edge_spm,
                               int grid_n) {
  const Portalgon& P = t.portalgon;
  TriangleSPM out;
  for (const Fragment& f : P.fragments()) {
    TriangleInterior ti;
    ti.fragment = f.id;
    ti.grid_n = grid_n;
    // Generators from the boundary intervals of the three edges.
    for (int e = 0; e < f.size(); ++e) {
      auto [se, side] = edge_spm.edge_index.at({f.id, e});
      for (const EdgeSpmInterval& iv : edge_spm.intervals[se]) {
        const SpmFunction& fn = edge_spm.functions[iv.fn];
        TriangleGenerator g;
        g.fn = iv.fn;
        g.offset = fn.fn.offset;
        if (fn.fragment == f.id) {
          g.apex = fn.fn.apex;
        } else {
          Isometry T = P.transition(edge_spm.edges[se].portal, fn.side);
          g.apex = T.apply(fn.fn.apex);
        }
        ti.generators.push_back(g);
      }
    }
    // Corner generators.
    for (int v = 0; v < f.size(); ++v) {
      int cls = P.vertex_class(f.id, v);
      double d = edge_spm.vertex_distance[cls];
      if (!std::isfinite(d)) continue;
      TriangleGenerator g;
      g.apex = f.vertices[v];
      g.offset = d;
      g.corner = v;
      ti.generators.push_back(g);
    }

    // Winner grid over barycentric samples.
    Point A = f.vertices[0], B = f.vertices[1], C = f.vertices[2];
    int n = grid_n;
    ti.winner.assign((n + 1) * (n + 1), -1);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j + i <= n; ++j) {
        double a = (double)i / n, b = (double)j / n;
        Point p = A + a * (B - A) + b * (C - A);
        double best = std::numeric_limits<double>::infinity();
        int win = -1;
        for (size_t g = 0; g < ti.generators.size(); ++g) {
          double v = ti.generators[g].offset +
                     dist(ti.generators[g].apex, p);
          if (v < best) {
            best = v;
            win = (int)g;
          }
        }
        ti.winner[i * (n + 1) + j] = win;
      }

    // Connected winner regions and adjacencies.
    std::vector<int> comp((n + 1) * (n + 1), -1);
    int cells = 0;
    std::set<std::pair<int, int>> adj;
    auto at = [&](int i, int j) -> int {
      if (i < 0 || j < 0 || i + j > n) return -1;
      return i * (n + 1) + j;
    };
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j + i <= n; ++j) {
        int idx = at(i, j);
        if (ti.winner[idx] < 0 || comp[idx] >= 0) continue;
        int id = cells++;
        std::vector<int> stack = {idx};
        comp[idx] = id;
        while (!stack.empty()) {
          int cu = stack.back();
          stack.pop_back();
          int ci = cu / (n + 1), cj = cu % (n + 1);
          for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                {1, -1}, {-1, 1}}) {
            int nb = at(ci + di, cj + dj);
            if (nb < 0) continue;
            if (ti.winner[nb] == ti.winner[cu]) {
              if (comp[nb] < 0) {
                comp[nb] = id;
                stack.push_back(nb);
              }
            } else if (ti.winner[nb] >= 0) {
              adj.insert(std::minmax(ti.winner[cu], ti.winner[nb]));
            }
          }
        }
      }
    ti.cell_count = cells;
    ti.adjacent_generators.assign(adj.begin(), adj.end());
    out.total_cells += cells;
    out.triangles.push_back(std::move(ti));
  }
  return out;
}

// ---------------------------------------------------------------------------
// ShortestPathMap
// ---------------------------------------------------------------------------

ShortestPathMap ShortestPathMap::compute(const Portalgon& p,
                                         const SurfacePoint& source,
                                         bool edges_only, int grid_n) {
  ShortestPathMap spm;
  spm.orig_ = std::make_shared<Portalgon>(p);
  spm.tri_ = triangulate(p, {source});
  spm.source_ = source;
  auto [sf, sv] = spm.tri_.extra_vertex_at[0];
  spm.source_class_ = spm.tri_.portalgon.vertex_class(sf, sv);
  SurfacePoint s_tri{sf, spm.tri_.portalgon.frag(sf).vertices[sv], {}};
  spm.edge_map_ = compute_edge_spm(spm.tri_, s_tri);
  if (!edges_only)
    spm.interior_map_ = extend_to_interior(spm.tri_, spm.edge_map_, grid_n);
  spm.orig_classes_ = original_vertex_classes(spm.tri_, p);
  return spm;
}

std::pair<int, Point> ShortestPathMap::locate_triangle(
    const SurfacePoint& q) const {
  for (const Fragment& f : tri_.portalgon.fragments()) {
    if (tri_.source_of(f.id) != q.fragment) continue;
    double tol = kEpsRel * std::max(1.0, f.diameter());
    if (point_in_polygon(q.location, f.vertices, tol))
      return {f.id, q.location};
  }
  fail(ErrorKind::NotOnSurface, "query point not on the surface");
}

double ShortestPathMap::distance(const SurfacePoint& q) const {
  return query(q).length;
}

GeodesicPath ShortestPathMap::query(const SurfacePoint& q) const {
  auto [fid, pos] = locate_triangle(q);
  const Portalgon& P = tri_.portalgon;
  const Fragment& f = P.frag(fid);
  const EdgeSPM& em = edge_map_;

  // Candidates: every signature function living on an edge of this triangle,
  // validated by its threading window.
  double best = std::numeric_limits<double>::infinity();
  int best_fn = -1;
  bool best_same_side = true;
  Isometry best_T;
  for (int e = 0; e < f.size(); ++e) {
    auto [se, side] = em.edge_index.at({fid, e});
    for (int sideq = 0; sideq < 2; ++sideq) {
      if (em.edges[se].boundary && sideq == 1) continue;
      for (const SpmFunction& fn : em.functions) {
        if (fn.edge != se || fn.side != sideq) continue;
        double v;
        bool same = fn.fragment == fid;
        Isometry T;
        if (same) {
          std::vector<Segment> gates;
          if (fn.has_gate) gates.push_back(fn.gate);
          if (!threads_to_point(fn.fn.apex, gates, pos)) continue;
          v = fn.fn.offset + dist(fn.fn.apex, pos);
        } else {
          T = P.transition(em.edges[se].portal, fn.side);
          Point apex = T.apply(fn.fn.apex);
          Segment seg = P.directed_segment(
              P.portals()[em.edges[se].portal].half[1 - fn.side]);
          Segment window{seg.at(fn.fn.domain.lo), seg.at(fn.fn.domain.hi)};
          if (!threads_to_point(apex, {window}, pos)) continue;
          v = fn.fn.offset + dist(apex, pos);
        }
        if (v < best) {
          best = v;
          best_fn = fn.id;
          best_same_side = same;
          best_T = T;
        }
      }
    }
    (void)side;
  }
  if (best_fn < 0)
    fail(ErrorKind::NotOnSurface, "query: no signature reaches the point");

  // Reconstruct the polyline by walking predecessor pointers.
  struct Piece {
    int fragment;  // triangulation fragment id
    Point a, b;
    bool merge_with_prev = false;  // diagonal crossing or same-chart bend
  };
  std::vector<Piece> pieces;  // collected backwards
  Signature tri_sig;

  int cur_fn = best_fn;
  Point x = pos;
  if (!best_same_side) {
    // The last leg lives in the query triangle; cross back into the
    // function's own side first.
    const SpmFunction& fn = em.functions[cur_fn];
    Point apex = best_T.apply(fn.fn.apex);
    Segment seg = P.directed_segment(
        P.portals()[em.edges[fn.edge].portal].half[1 - fn.side]);
    auto hit = line_line(apex, x - apex, seg.a, seg.dir());
    Point c = hit ? seg.at(std::clamp(hit->second, 0.0, 1.0)) : seg.at(0.5);
    bool diag = tri_.portal_source[em.edges[fn.edge].portal] < 0;
    pieces.push_back({fid, c, x, diag});
    tri_sig.elements.push_back(
        SignatureElement::crossing(em.edges[fn.edge].portal, fn.side));
    x = best_T.inverse().apply(c);
  }
  while (cur_fn >= 0) {
    const SpmFunction& fn = em.functions[cur_fn];
    Point entry;
    bool merge = false;
    if (fn.elem.kind == SignatureElement::Kind::Crossing && fn.pred >= 0) {
      auto hit = line_line(fn.fn.apex, x - fn.fn.apex, fn.gate.a,
                           fn.gate.dir());
      entry = hit ? fn.gate.at(std::clamp(hit->second, 0.0, 1.0))
                  : fn.gate.a;
      merge = tri_.portal_source[fn.elem.a] < 0;
    } else {
      entry = fn.fn.apex;  // vertex seed or the source itself
    }
    pieces.push_back({fn.fragment, entry, x, merge});
    if (fn.elem.kind == SignatureElement::Kind::Crossing && fn.pred >= 0) {
      tri_sig.elements.push_back(fn.elem);
      x = fn.from_pred.inverse().apply(entry);
      cur_fn = fn.pred;
    } else if (fn.pred >= 0) {
      tri_sig.elements.push_back(fn.elem);
      const SpmFunction& prev = em.functions[fn.pred];
      x = prev.fn.edge.at(fn.hop_t);
      cur_fn = fn.pred;
    } else {
      if (fn.elem.kind == SignatureElement::Kind::Vertex &&
          points_close(fn.fn.apex, x, 1.0 + norm(x)))
        ;  // zero-length start piece, dropped below
      cur_fn = -1;
    }
  }
  std::reverse(pieces.begin(), pieces.end());
  std::reverse(tri_sig.elements.begin(), tri_sig.elements.end());

  GeodesicPath path;
  path.length = best;
  // Signature in original terms.
  for (const SignatureElement& el : tri_sig.elements) {
    if (el.kind == SignatureElement::Kind::Crossing) {
      int src = tri_.portal_source[el.a];
      if (src >= 0)
        path.signature.elements.push_back(
            SignatureElement::crossing(src, el.b));
    } else {
      int oc = orig_classes_[el.a];
      if (oc >= 0)
        path.signature.elements.push_back(SignatureElement::vertex(oc));
    }
  }
  // Merge chart-connected pieces into per-fragment visits.
  double tol = kEpsRel * std::max(1.0, tri_.portalgon.scale());
  for (size_t i = 0; i < pieces.size(); ++i) {
    int src = tri_.source_of(pieces[i].fragment);
    bool merge = i > 0 && !path.visits.empty() &&
                 path.visits.back().fragment == src &&
                 (pieces[i].merge_with_prev ||
                  points_close(path.visits.back().polyline.back(),
                               pieces[i].a, tri_.portalgon.scale()));
    if (merge) {
      if (!points_close(path.visits.back().polyline.back(), pieces[i].b,
                        tri_.portalgon.scale()))
        path.visits.back().polyline.push_back(pieces[i].b);
    } else {
      PathVisit v;
      v.fragment = src;
      v.polyline = {pieces[i].a};
      if (!points_close(pieces[i].a, pieces[i].b, tri_.portalgon.scale()))
        v.polyline.push_back(pieces[i].b);
      path.visits.push_back(std::move(v));
    }
  }
  std::vector<PathVisit> kept;
  for (PathVisit& v : path.visits)
    if (v.polyline.size() >= 2 && v.length() > tol)
      kept.push_back(std::move(v));
  if (kept.empty() && !path.visits.empty())
    kept.push_back(path.visits.front());
  path.visits = std::move(kept);
  return path;
}

SpmComplexity ShortestPathMap::complexity() const {
  SpmComplexity c;
  c.signatures = (int)edge_map_.functions.size();
  for (const auto& ivs : edge_map_.intervals)
    c.edge_intervals += (int)ivs.size();
  c.interior_cells = interior_map_.total_cells;

  // Prefix tree over the signatures realized on the final edge map.
  struct Node {
    std::map<std::tuple<int, int, int>, int> children;
  };
  std::vector<Node> trie(1);
  int leaves = 0;
  for (const auto& ivs : edge_map_.intervals)
    for (const EdgeSpmInterval& iv : ivs) {
      std::vector<SignatureElement> elems;
      for (int cur2 = iv.fn; cur2 >= 0; cur2 = edge_map_.functions[cur2].pred)
        elems.push_back(edge_map_.functions[cur2].elem);
      std::reverse(elems.begin(), elems.end());
      int node = 0;
      int depth = 0;
      for (const SignatureElement& el : elems) {
        auto key = std::make_tuple((int)el.kind, el.a, el.b);
        auto it = trie[node].children.find(key);
        if (it == trie[node].children.end()) {
          trie.push_back({});
          trie[node].children[key] = (int)trie.size() - 1;
          node = (int)trie.size() - 1;
        } else {
          node = it->second;
        }
        ++depth;
      }
      c.prefix_depth = std::max(c.prefix_depth, depth);
    }
  for (const Node& nd : trie) {
    if (nd.children.empty()) ++leaves;
    c.prefix_max_branching =
        std::max(c.prefix_max_branching, (int)nd.children.size());
    if (nd.children.size() > 1) ++c.prefix_multi_children;
  }
  c.prefix_leaves = leaves;
  return c;
}

SpmComplexity spm_complexity(const ShortestPathMap& spm) {
  return spm.complexity();
}

}  // namespace portalgon
