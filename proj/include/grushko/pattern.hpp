#pragma once

// Dunwoody patterns on the canonical 2-complex: finitely many points on each
// edge, disjoint chords in each face joining them, every (corner, point) slot
// used exactly once.  Tracks are the connected components.

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "grushko/complex2d.hpp"

namespace grushko {

struct ChordEnd {
  int side = 0;  // side index in the face boundary word
  int spos = 0;  // position along the side's own traversal direction
  bool operator==(const ChordEnd& o) const { return side == o.side && spos == o.spos; }
};

struct Chord {
  int face = 0;
  ChordEnd a, b;  // a strictly before b in boundary order (side, spos)
};

struct Pattern {
  const TwoComplex* cx = nullptr;
  std::vector<int> npoints;   // points per edge
  std::vector<Chord> chords;

  // edge point hit by a chord end
  std::pair<int, int> end_point(const Chord& c, bool second) const {
    const ChordEnd& e = second ? c.b : c.a;
    int edge = cx->side_edge(c.face, e.side);
    int n = npoints[static_cast<std::size_t>(edge)];
    int pos = cx->side_sign(c.face, e.side) > 0 ? e.spos : n - 1 - e.spos;
    return {edge, pos};
  }
};

namespace detail {

inline long boundary_pos(const Pattern& p, int face, const ChordEnd& e) {
  // total order on chord-end slots around the face polygon
  long off = 0;
  for (int s = 0; s < e.side; ++s) {
    int edge = p.cx->side_edge(face, s);
    off += p.npoints[static_cast<std::size_t>(edge)];
  }
  return off + e.spos;
}

}  // namespace detail

struct PatternError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// structural validation: slots covered exactly once, chords ordered and
// pairwise non-crossing inside each face
inline void validate_pattern(const Pattern& p) {
  const TwoComplex& cx = *p.cx;
  if (static_cast<int>(p.npoints.size()) != cx.nedges)
    throw PatternError("npoints size mismatch");
  // occupancy per (face, side, spos)
  std::vector<std::vector<std::vector<int>>> used(cx.faces.size());
  for (std::size_t f = 0; f < cx.faces.size(); ++f) {
    used[f].resize(cx.faces[f].size());
    for (std::size_t s = 0; s < cx.faces[f].size(); ++s)
      used[f][s].assign(
          static_cast<std::size_t>(p.npoints[static_cast<std::size_t>(gen_of(cx.faces[f][s]))]),
          0);
  }
  for (const auto& c : p.chords) {
    for (int half = 0; half < 2; ++half) {
      const ChordEnd& e = half ? c.b : c.a;
      if (c.face < 0 || c.face >= static_cast<int>(cx.faces.size()))
        throw PatternError("chord face out of range");
      if (e.side < 0 || e.side >= cx.face_len(c.face)) throw PatternError("chord side out of range");
      auto& slot = used[static_cast<std::size_t>(c.face)][static_cast<std::size_t>(e.side)];
      if (e.spos < 0 || e.spos >= static_cast<int>(slot.size()))
        throw PatternError("chord spos out of range");
      if (slot[static_cast<std::size_t>(e.spos)]++) throw PatternError("slot used twice");
    }
    if (detail::boundary_pos(p, c.face, c.a) >= detail::boundary_pos(p, c.face, c.b))
      throw PatternError("chord ends out of order");
  }
  for (std::size_t f = 0; f < used.size(); ++f)
    for (auto& side : used[f])
      for (int u : side)
        if (u != 1) throw PatternError("unmatched point slot");
  // non-crossing within each face
  for (std::size_t i = 0; i < p.chords.size(); ++i)
    for (std::size_t j = i + 1; j < p.chords.size(); ++j) {
      const Chord &c = p.chords[i], &d = p.chords[j];
      if (c.face != d.face) continue;
      long a1 = detail::boundary_pos(p, c.face, c.a), b1 = detail::boundary_pos(p, c.face, c.b);
      long a2 = detail::boundary_pos(p, c.face, d.a), b2 = detail::boundary_pos(p, c.face, d.b);
      bool inside1 = a1 < a2 && a2 < b1, inside2 = a1 < b2 && b2 < b1;
      if (inside1 != inside2) throw PatternError("crossing chords");
    }
}

// connected component of a pattern
struct Track {
  std::vector<int> chords;                  // indices into Pattern::chords
  std::vector<std::pair<int, int>> points;  // (edge, pos)
  long length() const { return static_cast<long>(points.size()); }
};

inline std::vector<Track> components(const Pattern& p) {
  // union-find over edge points; chords join their two endpoints
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> pts;
  for (int e = 0; e < p.cx->nedges; ++e)
    for (int k = 0; k < p.npoints[static_cast<std::size_t>(e)]; ++k) {
      id[{e, k}] = static_cast<int>(pts.size());
      pts.emplace_back(e, k);
    }
  std::vector<int> uf(pts.size());
  for (std::size_t i = 0; i < uf.size(); ++i) uf[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (uf[static_cast<std::size_t>(x)] != x)
      x = uf[static_cast<std::size_t>(x)] = uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(x)])];
    return x;
  };
  for (const auto& c : p.chords) {
    int u = id.at(p.end_point(c, false)), v = id.at(p.end_point(c, true));
    uf[static_cast<std::size_t>(find(u))] = find(v);
  }
  std::map<int, int> comp;  // root -> track index
  std::vector<Track> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    int r = find(static_cast<int>(i));
    if (!comp.count(r)) {
      comp[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(comp[r])].points.push_back(pts[i]);
  }
  for (std::size_t ci = 0; ci < p.chords.size(); ++ci) {
    int r = find(id.at(p.end_point(p.chords[ci], false)));
    out[static_cast<std::size_t>(comp[r])].chords.push_back(static_cast<int>(ci));
  }
  return out;
}

// keep a single component, renumbering the points of each edge
inline Pattern restrict_to_track(const Pattern& p, const Track& t) {
  Pattern out;
  out.cx = p.cx;
  out.npoints.assign(static_cast<std::size_t>(p.cx->nedges), 0);
  std::map<std::pair<int, int>, int> newpos;
  std::vector<std::pair<int, int>> sorted = t.points;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [e, k] : sorted) newpos[{e, k}] = out.npoints[static_cast<std::size_t>(e)]++;
  for (int ci : t.chords) {
    Chord c = p.chords[static_cast<std::size_t>(ci)];
    Chord nc;
    nc.face = c.face;
    for (int half = 0; half < 2; ++half) {
      const ChordEnd& e = half ? c.b : c.a;
      auto [edge, pos] = p.end_point(c, half);
      int np = newpos.at({edge, pos});
      ChordEnd ne;
      ne.side = e.side;
      int n = out.npoints[static_cast<std::size_t>(edge)];
      ne.spos = p.cx->side_sign(c.face, e.side) > 0 ? np : n - 1 - np;
      (half ? nc.b : nc.a) = ne;
    }
    if (detail::boundary_pos(out, nc.face, nc.a) > detail::boundary_pos(out, nc.face, nc.b))
      std::swap(nc.a, nc.b);
    out.chords.push_back(nc);
  }
  validate_pattern(out);
  return out;
}

// orientation bookkeeping per chord end: side "A" of a chord is the region
// whose boundary runs forward from end a to end b.  At end a the A-side
// faces increasing side positions, at end b decreasing; composing with the
// side's traversal sign gives the direction along the edge itself.
inline bool end_toward_target(const Pattern& p, const Chord& c, bool second) {
  const ChordEnd& e = second ? c.b : c.a;
  int sigma = p.cx->side_sign(c.face, e.side);
  return (!second) == (sigma > 0);
}

// consistent transverse orientation across shared edge points, for all
// chords at once.  Entry ci says whether chord ci's intrinsic A side must be
// flipped.  nullopt when some component is one-sided.
inline std::optional<std::vector<bool>> transverse_orientation(const Pattern& p) {
  std::vector<int> parent(p.chords.size()), parity(p.chords.size(), 0);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<std::pair<int, int>(int)> find = [&](int x) -> std::pair<int, int> {
    if (parent[static_cast<std::size_t>(x)] == x) return {x, 0};
    auto [r, par] = find(parent[static_cast<std::size_t>(x)]);
    parent[static_cast<std::size_t>(x)] = r;
    parity[static_cast<std::size_t>(x)] ^= par;
    return {r, parity[static_cast<std::size_t>(x)]};
  };
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> at;
  for (std::size_t ci = 0; ci < p.chords.size(); ++ci) {
    const Chord& c = p.chords[ci];
    for (int half = 0; half < 2; ++half) {
      int toward = end_toward_target(p, c, half != 0) ? 1 : 0;
      at[p.end_point(c, half != 0)].emplace_back(static_cast<int>(ci), toward);
    }
  }
  for (auto& [pt, ends] : at) {
    for (std::size_t i = 1; i < ends.size(); ++i) {
      auto [c1, t1] = ends[0];
      auto [c2, t2] = ends[i];
      int want = t1 == t2 ? 0 : 1;
      auto [r1, p1] = find(c1);
      auto [r2, p2] = find(c2);
      if (r1 == r2) {
        if ((p1 ^ p2) != want) return std::nullopt;
      } else {
        parent[static_cast<std::size_t>(r1)] = r2;
        parity[static_cast<std::size_t>(r1)] = p1 ^ p2 ^ want;
      }
    }
  }
  std::vector<bool> flip(p.chords.size(), false);
  for (std::size_t ci = 0; ci < p.chords.size(); ++ci)
    flip[ci] = find(static_cast<int>(ci)).second != 0;
  return flip;
}

// two-sidedness of one component: same parity propagation, conflict = one-sided
inline bool is_two_sided(const Pattern& p, const Track& t) {
  std::map<int, int> parent, parity;  // chord index -> (parent, relative flip)
  std::function<std::pair<int, int>(int)> find = [&](int x) -> std::pair<int, int> {
    if (parent[x] == x) return {x, 0};
    auto [r, par] = find(parent[x]);
    parent[x] = r;
    parity[x] ^= par;
    return {r, parity[x]};
  };
  for (int ci : t.chords) {
    parent[ci] = ci;
    parity[ci] = 0;
  }
  // collect ends per edge point: (chord, end, toward_target_for_A_side)
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> at;
  for (int ci : t.chords) {
    const Chord& c = p.chords[static_cast<std::size_t>(ci)];
    for (int half = 0; half < 2; ++half) {
      const ChordEnd& e = half ? c.b : c.a;
      int sigma = p.cx->side_sign(c.face, e.side);
      // A-side faces the edge target iff (end a) == (sigma positive)
      int toward_target = ((half == 0) == (sigma > 0)) ? 1 : 0;
      at[p.end_point(c, half)].emplace_back(ci, toward_target);
    }
  }
  for (auto& [pt, ends] : at) {
    for (std::size_t i = 1; i < ends.size(); ++i) {
      // consistent transverse orientation: the A-sides of consecutive ends
      // must point the same way along the edge
      auto [c1, t1] = ends[0];
      auto [c2, t2] = ends[i];
      int want = t1 == t2 ? 0 : 1;  // relative flip between the two chords
      auto [r1, p1] = find(c1);
      auto [r2, p2] = find(c2);
      if (r1 == r2) {
        if ((p1 ^ p2) != want) return false;
      } else {
        parent[r1] = r2;
        parity[r1] = p1 ^ p2 ^ want;
      }
    }
  }
  return true;
}

// word contribution of a chord: boundary path from end a forward to end b,
// with the half-edges at the two ends folded into whole letters (the leading
// edge survives iff its side is traversed positively, the trailing edge
// iff negatively)
inline Word chord_word(const TwoComplex& cx, int face, int sa, int sb) {
  if (sa == sb) return {};
  Word w;
  int l1 = cx.faces[static_cast<std::size_t>(face)][static_cast<std::size_t>(sa)];
  if (l1 > 0) w.push_back(l1);
  for (int s = sa + 1; s < sb; ++s)
    w.push_back(cx.faces[static_cast<std::size_t>(face)][static_cast<std::size_t>(s)]);
  int l2 = cx.faces[static_cast<std::size_t>(face)][static_cast<std::size_t>(sb)];
  if (l2 < 0) w.push_back(l2);  // i.e. the edge inverse
  return w;
}

inline Word chord_word(const Pattern& p, const Chord& c) {
  return chord_word(*p.cx, c.face, c.a.side, c.b.side);
}

// generators of the image of pi_1(track) in the ambient group: spanning tree
// over (points, chords), one loop word per surplus chord
inline std::vector<Word> track_group_generators(const Pattern& p, const Track& t) {
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> adj;  // point -> (chord, end)
  for (int ci : t.chords)
    for (int half = 0; half < 2; ++half)
      adj[p.end_point(p.chords[static_cast<std::size_t>(ci)], half)].emplace_back(ci, half);
  if (t.points.empty()) return {};
  std::map<std::pair<int, int>, Word> path;  // anchor word from root to point
  std::set<int> tree;
  std::pair<int, int> root = *std::min_element(t.points.begin(), t.points.end());
  path[root] = {};
  std::vector<std::pair<int, int>> queue{root};
  while (!queue.empty()) {
    auto x = queue.back();
    queue.pop_back();
    for (auto [ci, half] : adj[x]) {
      const Chord& c = p.chords[static_cast<std::size_t>(ci)];
      auto y = p.end_point(c, half == 0);  // other endpoint
      if (path.count(y)) continue;
      tree.insert(ci);
      Word w = chord_word(p, c);
      path[y] = free_reduce(concat(path[x], half == 0 ? w : inverse(w)));
      queue.push_back(y);
    }
  }
  std::vector<Word> gens;
  for (int ci : t.chords) {
    if (tree.count(ci)) continue;
    const Chord& c = p.chords[static_cast<std::size_t>(ci)];
    auto x = p.end_point(c, false), y = p.end_point(c, true);
    Word loop = concat(concat(path.at(x), chord_word(p, c)), inverse(path.at(y)));
    gens.push_back(free_reduce(loop));
  }
  return gens;
}

}  // namespace grushko
