#pragma once

#include <optional>
#include <vector>

#include "portalgon/unfold.hpp"

// Insertion-only lower envelope over partial functions that pairwise cross
// at most twice, kept as a collection of static per-level envelopes merged
// by the logarithmic method. Queries may delete intervals that have become
// permanently dominated; every interval is deleted at most once.

namespace portalgon {

// Requirements on Curve:
//   Interval domain() const;
//   double value(double t) const;            (defined on the domain)
//   double min_param() const;                (argmin clamped to the domain)
// and a free function
//   std::vector<double> curve_intersections(const Curve&, const Curve&);
// returning at most two parameters where the full curves meet.

struct ApexedCurve {
  ApexedDistanceFunction fn;

  Interval domain() const { return fn.domain; }
  double value(double t) const { return fn.value(t); }
  double min_param() const { return fn.min_param(); }
};

inline std::vector<double> curve_intersections(const ApexedCurve& a,
                                               const ApexedCurve& b) {
  return apexed_intersections(a.fn, b.fn);
}

struct EnvInterval {
  double xlo = 0.0;
  double xhi = 0.0;
  int fn = -1;
};

struct EnvMinimum {
  double value = 0.0;
  double t = 0.0;
  int fn = -1;
};

struct EnvCounters {
  long intervals_created = 0;
  long intervals_deleted = 0;  // full erasures: each interval at most once
  long intervals_shrunk = 0;   // partial deletions at a walk boundary
  long walk_steps = 0;
  long merges = 0;
};

struct NextMinimum {
  double t = 0.0;
  double value = 0.0;
  int fn = -1;
};

struct NextVertexResult {
  double t = 0.0;
  double value = 0.0;
};

template <class Curve>
class DynamicLowerEnvelope {
 public:
  // Returns the id of the inserted function.
  int insert(Curve c) {
    int id = (int)arena_.size();
    arena_.push_back(std::move(c));
    Level fresh = singleton_level(id);
    int i = 0;
    while (true) {
      if ((int)levels_.size() <= i) levels_.resize(i + 1);
      if (!levels_[i]) {
        levels_[i] = std::move(fresh);
        break;
      }
      fresh = merge_levels(*levels_[i], fresh);
      levels_[i].reset();
      ++i;
    }
    return id;
  }

  int size() const { return (int)arena_.size(); }
  const Curve& curve(int fn) const { return arena_[fn]; }
  const EnvCounters& counters() const { return counters_; }

  // Smallest local minimum of the envelope with value strictly above delta.
  std::optional<NextMinimum> next_local_minimum(double delta) {
    std::optional<NextMinimum> best;
    for (auto& lvl : levels_) {
      if (!lvl) continue;
      auto& mins = lvl->minima;
      size_t i = std::upper_bound(mins.begin(), mins.end(), delta,
                                  [](double d, const EnvMinimum& m) {
                                    return d < m.value;
                                  }) -
                 mins.begin();
      while (i < mins.size()) {
        const EnvMinimum& m = mins[i];
        // Lazily drop minima that no longer touch the envelope: their
        // interval was deleted, or a lower function shadows them globally.
        // Both conditions are permanent, insertions only lower the envelope.
        double tol = 1e-9 * std::max(1.0, std::abs(m.value));
        int live = realizing_in_level(*lvl, m.t);
        bool on_level = live >= 0 &&
                        std::abs(arena_[live].value(m.t) - m.value) <= tol;
        if (!on_level || m.value > value_at(m.t) + tol) {
          mins.erase(mins.begin() + i);
          continue;
        }
        if (!best || m.value < best->value) best = {{m.t, m.value, m.fn}};
        break;  // minima are value-sorted per level
      }
    }
    return best;
  }

  // Lowest endpoint strictly above f(q) of the envelope segment through
  // (q, f(q)); walks the per-level envelopes, deleting intervals that are
  // now permanently dominated by fn.
  std::optional<NextVertexResult> next_vertex(int fn, double q) {
    const Curve& f = arena_[fn];
    double fq = f.value(q);
    double env = value_at(q);
    if (!(f.value(q) <= env + 1e-9))
      fail(ErrorKind::NotOnEnvelope,
           "next_vertex: function does not realize the envelope at q");

    std::optional<double> right = depart_point(fn, q, +1);
    std::optional<double> left = depart_point(fn, q, -1);
    std::optional<NextVertexResult> best;
    for (std::optional<double> x : {left, right}) {
      if (!x) continue;
      double v = f.value(*x);
      if (v > fq && (!best || v < best->value)) best = {{*x, v}};
    }
    return best;
  }

  // Pointwise envelope value (+infinity where nothing is defined).
  double value_at(double t) const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& lvl : levels_) {
      if (!lvl) continue;
      int fn = realizing_in_level(*lvl, t);
      if (fn >= 0) v = std::min(v, arena_[fn].value(t));
    }
    return v;
  }

  // Function realizing the envelope at t (-1 when undefined there).
  int realizing(double t) const {
    double v = std::numeric_limits<double>::infinity();
    int who = -1;
    for (const auto& lvl : levels_) {
      if (!lvl) continue;
      int fn = realizing_in_level(*lvl, t);
      if (fn >= 0 && arena_[fn].value(t) < v) {
        v = arena_[fn].value(t);
        who = fn;
      }
    }
    return who;
  }

  // Bit i set when level i holds a static envelope.
  int levels_occupied_mask() const {
    int mask = 0;
    for (size_t i = 0; i < levels_.size(); ++i)
      if (levels_[i]) mask |= 1 << i;
    return mask;
  }

  // Single merged interval list over all levels (builds a fresh envelope;
  // does not mutate the structure).
  std::vector<EnvInterval> flatten() const {
    Level acc;
    bool any = false;
    for (const auto& lvl : levels_) {
      if (!lvl) continue;
      if (!any) {
        acc = *lvl;
        any = true;
      } else {
        acc = merge_scan(acc, *lvl, nullptr);
      }
    }
    return acc.intervals;
  }

 private:
  struct Level {
    std::vector<EnvInterval> intervals;  // x-sorted, disjoint
    std::vector<EnvMinimum> minima;      // value-sorted
    int count = 0;                       // functions represented
  };

  std::vector<std::optional<Level>> levels_;
  std::vector<Curve> arena_;
  EnvCounters counters_;

  static int find_interval(const std::vector<EnvInterval>& ivs, double t) {
    // Index of the interval containing t, or -1. At a shared breakpoint the
    // right piece is returned; callers that care compare values of both.
    size_t lo = std::upper_bound(ivs.begin(), ivs.end(), t,
                                 [](double x, const EnvInterval& iv) {
                                   return x < iv.xhi;
                                 }) -
                ivs.begin();
    if (lo < ivs.size() && ivs[lo].xlo <= t + 1e-15) return (int)lo;
    if (lo > 0 && t <= ivs[lo - 1].xhi + 1e-15 &&
        t >= ivs[lo - 1].xlo - 1e-15)
      return (int)lo - 1;
    return -1;
  }

  // Function with the lowest value among the (at most two) intervals of the
  // level touching t.
  int realizing_in_level(const Level& lvl, double t) const {
    const auto& ivs = lvl.intervals;
    int i = find_interval(ivs, t);
    if (i < 0) return -1;
    int who = ivs[i].fn;
    double v = arena_[who].value(t);
    if (i > 0 && t <= ivs[i - 1].xhi + 1e-15 && t >= ivs[i - 1].xlo - 1e-15) {
      double v2 = arena_[ivs[i - 1].fn].value(t);
      if (v2 < v) who = ivs[i - 1].fn;
    }
    return who;
  }

  Level singleton_level(int id) {
    Level lvl;
    Interval d = arena_[id].domain();
    lvl.intervals.push_back({d.lo, d.hi, id});
    counters_.intervals_created += 1;
    lvl.count = 1;
    rebuild_minima(lvl);
    return lvl;
  }

  void rebuild_minima(Level& lvl) {
    lvl.minima.clear();
    std::vector<int> fns;
    for (const EnvInterval& iv : lvl.intervals) fns.push_back(iv.fn);
    std::sort(fns.begin(), fns.end());
    fns.erase(std::unique(fns.begin(), fns.end()), fns.end());
    for (int fn : fns) {
      double t = arena_[fn].min_param();
      double v = arena_[fn].value(t);
      int live = realizing_in_level(lvl, t);
      if (live < 0) continue;
      double lv = arena_[live].value(t);
      if (v <= lv + 1e-9 * std::max(1.0, std::abs(v)))
        lvl.minima.push_back({v, t, fn});
    }
    std::sort(lvl.minima.begin(), lvl.minima.end(),
              [](const EnvMinimum& a, const EnvMinimum& b) {
                return a.value < b.value;
              });
  }

  // Lower envelope of two interval lists by a simultaneous scan.
  Level merge_scan(const Level& a, const Level& b, long* created) const {
    std::vector<double> cuts;
    for (const EnvInterval& iv : a.intervals) {
      cuts.push_back(iv.xlo);
      cuts.push_back(iv.xhi);
    }
    for (const EnvInterval& iv : b.intervals) {
      cuts.push_back(iv.xlo);
      cuts.push_back(iv.xhi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Level out;
    out.count = a.count + b.count;
    auto emit = [&](double xlo, double xhi, int fn) {
      if (fn < 0 || xhi < xlo) return;
      if (!out.intervals.empty() && out.intervals.back().fn == fn &&
          out.intervals.back().xhi >= xlo - 1e-15)
        out.intervals.back().xhi = xhi;
      else
        out.intervals.push_back({xlo, xhi, fn});
    };

    for (size_t ci = 0; ci + 1 < cuts.size(); ++ci) {
      double x0 = cuts[ci], x1 = cuts[ci + 1];
      double mid = 0.5 * (x0 + x1);
      int fa = realizing_in_level(a, mid);
      int fb = realizing_in_level(b, mid);
      if (fa < 0 && fb < 0) continue;
      if (fa < 0 || fb < 0) {
        emit(x0, x1, fa < 0 ? fb : fa);
        continue;
      }
      // Both defined: split at their crossings inside the span.
      std::vector<double> xs = {x0};
      for (double t : curve_intersections(arena_[fa], arena_[fb]))
        if (t > x0 + 1e-14 && t < x1 - 1e-14) xs.push_back(t);
      xs.push_back(x1);
      std::sort(xs.begin(), xs.end());
      for (size_t k = 0; k + 1 < xs.size(); ++k) {
        double m = 0.5 * (xs[k] + xs[k + 1]);
        int win = arena_[fa].value(m) <= arena_[fb].value(m) ? fa : fb;
        emit(xs[k], xs[k + 1], win);
      }
    }
    if (created) *created += (long)out.intervals.size();
    return out;
  }

  Level merge_levels(const Level& a, const Level& b) {
    counters_.merges += 1;
    Level out = merge_scan(a, b, &counters_.intervals_created);
    rebuild_minima(out);
    return out;
  }

  // First parameter (in walking direction) where the envelope departs from
  // fn, or the end of fn's domain; nothing when the envelope follows fn
  // into an open end beyond its domain... fn's domain end always caps.
  std::optional<double> depart_point(int fn, double q, int dir) {
    const Curve& f = arena_[fn];
    Interval dom = f.domain();
    double best = dir > 0 ? dom.hi : dom.lo;  // the domain end always caps
    for (auto& lvl : levels_) {
      if (!lvl) continue;
      auto& ivs = lvl->intervals;
      if (ivs.empty()) continue;
      int idx = find_interval(ivs, q);
      if (idx < 0) {
        // Start from the first interval in the walking direction.
        if (dir > 0) {
          idx = (int)(std::lower_bound(ivs.begin(), ivs.end(), q,
                                       [](const EnvInterval& iv, double x) {
                                         return iv.xhi < x;
                                       }) -
                      ivs.begin());
          if (idx >= (int)ivs.size()) continue;
        } else {
          idx = (int)(std::upper_bound(ivs.begin(), ivs.end(), q,
                                       [](double x, const EnvInterval& iv) {
                                         return x < iv.xlo;
                                       }) -
                      ivs.begin()) -
                1;
          if (idx < 0) continue;
        }
      }
      while (idx >= 0 && idx < (int)ivs.size()) {
        EnvInterval iv = ivs[idx];
        double wlo = dir > 0 ? std::max(iv.xlo, q) : iv.xlo;
        double whi = dir > 0 ? iv.xhi : std::min(iv.xhi, q);
        if (dir > 0 && wlo > best + 1e-15) break;
        if (dir < 0 && whi < best - 1e-15) break;
        counters_.walk_steps += 1;
        if (iv.fn == fn) {
          // Our own piece: its far end is a candidate departure.
          double end = dir > 0 ? iv.xhi : iv.xlo;
          if (dir > 0 ? end < best : end > best) best = end;
          idx += dir;
          continue;
        }
        const Curve& g = arena_[iv.fn];
        // Crossing of f and g strictly inside the walked part.
        std::optional<double> crossing;
        for (double t : curve_intersections(f, g))
          if (t >= wlo - 1e-14 && t <= whi + 1e-14) {
            if (dir > 0 ? (t > q + 1e-14) : (t < q - 1e-14)) {
              if (!crossing || (dir > 0 ? t < *crossing : t > *crossing))
                crossing = t;
            }
          }
        if (crossing) {
          if (dir > 0 ? *crossing < best : *crossing > best) best = *crossing;
          break;
        }
        // Entered at a point where g is already strictly below f: the
        // envelope left f at the border of this interval.
        double entry = dir > 0 ? wlo : whi;
        if (g.value(entry) < f.value(entry) - 1e-12) {
          if (dir > 0 ? entry < best : entry > best) best = entry;
          break;
        }
        // f dominates g on the whole walked stretch: the stretch will never
        // reappear on the envelope, so delete it.
        if (f.value(wlo) <= g.value(wlo) + 1e-12 &&
            f.value(whi) <= g.value(whi) + 1e-12 &&
            f.domain().contains(wlo, 1e-12) &&
            f.domain().contains(whi, 1e-12)) {
          if (wlo > iv.xlo + 1e-15 || whi < iv.xhi - 1e-15) {
            // Only part of the interval is dominated: shrink it.
            if (dir > 0)
              ivs[idx].xhi = wlo;
            else
              ivs[idx].xlo = whi;
            counters_.intervals_shrunk += 1;
            idx += dir;
            continue;
          }
          ivs.erase(ivs.begin() + idx);
          counters_.intervals_deleted += 1;
          if (dir < 0) idx -= 1;
          continue;
        }
        // g pokes below f somewhere ahead without a recorded crossing
        // (numerical corner): stop conservatively at the far border.
        double far = dir > 0 ? whi : wlo;
        if (dir > 0 ? far < best : far > best) best = far;
        break;
      }
    }
    return best;
  }
};

extern template class DynamicLowerEnvelope<ApexedCurve>;

}  // namespace portalgon
