#pragma once

// Train tracks on the canonical 2-complex: one vertex per edge midpoint, and
// branches which are parallelism classes of chords (a face plus an unordered
// pair of its sides).  The midpoint vertex of an edge has a book-of-pages
// neighbourhood, one page per occurrence of the edge in a face boundary; a
// nonnegative weighting of the branches is carried by an embedded pattern
// exactly when every page of the same book receives the same total weight.

#include <algorithm>
#include <cassert>
#include <compare>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "grushko/numeric.hpp"
#include "grushko/pattern.hpp"

namespace grushko {

struct Branch {
  int face = -1;       // -1: isolated-point class on a bare edge
  int s1 = 0, s2 = 0;  // sides of the face, s1 <= s2 (chord classes only)
  int edge = -1;       // bare edge id (bare classes only)
  auto operator<=>(const Branch&) const = default;
};

struct TrainTrack {
  const TwoComplex* cx = nullptr;
  std::vector<Branch> branches;
};

// chords of distinct classes can always be drawn disjointly unless their side
// pairs strictly interleave around the face polygon (sharing a side never
// forces a crossing: the blocks nest)
inline bool branches_cross(const Branch& a, const Branch& b) {
  if (a.face < 0 || b.face < 0 || a.face != b.face) return false;
  if (b.s1 == a.s1 || b.s1 == a.s2 || b.s2 == a.s1 || b.s2 == a.s2) return false;
  bool in1 = a.s1 < b.s1 && b.s1 < a.s2;
  bool in2 = a.s1 < b.s2 && b.s2 < a.s2;
  return in1 != in2;
}

inline void validate_traintrack(const TrainTrack& tt) {
  const TwoComplex& cx = *tt.cx;
  auto corner_count = [&](int e) {
    int n = 0;
    for (const auto& f : cx.faces)
      for (int l : f)
        if (gen_of(l) == e) n++;
    return n;
  };
  for (std::size_t i = 0; i < tt.branches.size(); ++i) {
    const Branch& b = tt.branches[i];
    if (b.face < 0) {
      if (b.edge < 0 || b.edge >= cx.nedges)
        throw std::invalid_argument("traintrack: bare edge out of range");
      if (corner_count(b.edge) != 0)
        throw std::invalid_argument("traintrack: bare class on an edge with pages");
    } else {
      if (b.face >= static_cast<int>(cx.faces.size()))
        throw std::invalid_argument("traintrack: face out of range");
      if (b.s1 > b.s2 || b.s1 < 0 || b.s2 >= cx.face_len(b.face))
        throw std::invalid_argument("traintrack: bad side pair");
    }
    for (std::size_t j = i + 1; j < tt.branches.size(); ++j) {
      if (tt.branches[j] == b) throw std::invalid_argument("traintrack: duplicate branch");
      if (branches_cross(b, tt.branches[j]))
        throw std::invalid_argument("traintrack: crossing branches");
    }
  }
}

// every chord class and every bare-edge class of the complex
inline std::vector<Branch> all_chord_classes(const TwoComplex& cx) {
  std::vector<Branch> out;
  for (int f = 0; f < static_cast<int>(cx.faces.size()); ++f)
    for (int s1 = 0; s1 < cx.face_len(f); ++s1)
      for (int s2 = s1; s2 < cx.face_len(f); ++s2) {
        Branch b;
        b.face = f;
        b.s1 = s1;
        b.s2 = s2;
        out.push_back(b);
      }
  auto corners = cx.corners();
  for (int e = 0; e < cx.nedges; ++e)
    if (corners[static_cast<std::size_t>(e)].empty()) {
      Branch b;
      b.edge = e;
      out.push_back(b);
    }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

// multiplicity of branch b in page (face, side); same-side classes count twice
inline Int page_coef(const Branch& b, int face, int side) {
  if (b.face != face) return 0;
  return Int((b.s1 == side ? 1 : 0) + (b.s2 == side ? 1 : 0));
}

}  // namespace detail

// Page coverage: a midpoint vertex belongs to the track as soon as one
// branch ends on the edge; then every page of its book neighbourhood must
// meet a branch or no pattern can carry the track.
inline bool covers_pages(const TwoComplex& cx, const std::vector<Branch>& branches) {
  auto corners = cx.corners();
  for (int e = 0; e < cx.nedges; ++e) {
    const auto& pages = corners[static_cast<std::size_t>(e)];
    bool touched = false, all = true;
    for (const auto& [f, s] : pages) {
      bool hit = false;
      for (const Branch& b : branches)
        if (detail::page_coef(b, f, s) != 0) hit = true;
      touched = touched || hit;
      all = all && hit;
    }
    if (touched && !all) return false;
  }
  return true;
}

// all nonempty pairwise non-crossing branch subsets passing page coverage
inline std::vector<TrainTrack> enumerate_train_tracks(const TwoComplex& cx) {
  std::vector<Branch> classes = all_chord_classes(cx);
  std::vector<TrainTrack> out;
  std::vector<Branch> cur;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == classes.size()) {
      if (!cur.empty() && covers_pages(cx, cur)) out.push_back(TrainTrack{&cx, cur});
      return;
    }
    self(self, i + 1);
    bool ok = true;
    for (const Branch& b : cur)
      if (branches_cross(b, classes[i])) ok = false;
    if (ok) {
      cur.push_back(classes[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// the linear system expressing equal page sums around every midpoint vertex:
// one row per consecutive page pair of each edge
struct PageSystem {
  IntMatrix rows;
  std::size_t nbranches = 0;
};

inline PageSystem page_system(const TrainTrack& tt) {
  PageSystem ps;
  ps.nbranches = tt.branches.size();
  auto corners = tt.cx->corners();
  for (int e = 0; e < tt.cx->nedges; ++e) {
    const auto& pages = corners[static_cast<std::size_t>(e)];
    bool touched = false;
    for (const auto& [f, s] : pages)
      for (const Branch& b : tt.branches)
        if (detail::page_coef(b, f, s) != 0) touched = true;
    if (!touched) continue;  // vertex absent from the track: no switch there
    for (std::size_t k = 0; k + 1 < pages.size(); ++k) {
      std::vector<Int> row(ps.nbranches, Int(0));
      for (std::size_t j = 0; j < ps.nbranches; ++j)
        row[j] = detail::page_coef(tt.branches[j], pages[k].first, pages[k].second) -
                 detail::page_coef(tt.branches[j], pages[k + 1].first, pages[k + 1].second);
      ps.rows.push_back(std::move(row));
    }
  }
  return ps;
}

// formal consistency: a nonzero nonnegative branch weighting with equal page
// sums (decided exactly; no integrality gap since the system is homogeneous)
inline bool is_formally_consistent(const TrainTrack& tt) {
  if (tt.branches.empty()) return false;
  PageSystem ps = page_system(tt);
  return nonneg_kernel_nonzero(ps.rows, ps.nbranches);
}

// all integer weightings with entries in [0, bound], not all zero
inline std::vector<std::vector<long>> solve_measures(const TrainTrack& tt, long bound) {
  PageSystem ps = page_system(tt);
  return enumerate_nonneg_solutions(ps.rows, ps.nbranches, bound);
}

// Realize an integer weighting as an embedded pattern.  Within each side the
// chord-end blocks are ordered by descending forward span, which forces the
// nested layout; parallel copies of a class are matched in reversed order
// across the two sides, copies of a same-side class nest like brackets.
inline Pattern pattern_from_measured(const TrainTrack& tt, const std::vector<long>& measure) {
  const TwoComplex& cx = *tt.cx;
  if (measure.size() != tt.branches.size())
    throw std::invalid_argument("pattern_from_measured: measure size mismatch");
  for (long m : measure)
    if (m < 0) throw std::invalid_argument("pattern_from_measured: negative weight");

  Pattern pat;
  pat.cx = &cx;
  pat.npoints.assign(static_cast<std::size_t>(cx.nedges), 0);

  // page sums fix the point counts; bare classes add isolated points
  auto corners = cx.corners();
  for (int e = 0; e < cx.nedges; ++e) {
    const auto& pages = corners[static_cast<std::size_t>(e)];
    long n = 0;
    if (pages.empty()) {
      for (std::size_t j = 0; j < tt.branches.size(); ++j)
        if (tt.branches[j].face < 0 && tt.branches[j].edge == e) n += measure[j];
    } else {
      for (std::size_t p = 0; p < pages.size(); ++p) {
        long sum = 0;
        for (std::size_t j = 0; j < tt.branches.size(); ++j)
          sum += static_cast<long>(detail::page_coef(tt.branches[j], pages[p].first,
                                                     pages[p].second)) *
                 measure[j];
        if (p == 0)
          n = sum;
        else if (sum != n)
          throw std::invalid_argument("pattern_from_measured: measure violates page condition");
      }
    }
    pat.npoints[static_cast<std::size_t>(e)] = static_cast<int>(n);
  }

  // per face: assign side positions block by block
  for (int f = 0; f < static_cast<int>(cx.faces.size()); ++f) {
    int L = cx.face_len(f);
    // (branch index, side) -> first position of its block
    std::map<std::pair<std::size_t, int>, int> block_start;
    for (int s = 0; s < L; ++s) {
      // blocks on side s: (forward span, branch index, ends here)
      std::vector<std::pair<int, std::size_t>> blocks;
      for (std::size_t j = 0; j < tt.branches.size(); ++j) {
        const Branch& b = tt.branches[j];
        if (b.face != f || measure[j] == 0) continue;
        if (b.s1 == s && b.s2 == s)
          blocks.push_back({0, j});
        else if (b.s1 == s)
          blocks.push_back({b.s2 - b.s1, j});
        else if (b.s2 == s)
          blocks.push_back({L - (b.s2 - b.s1), j});
      }
      std::sort(blocks.begin(), blocks.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      int pos = 0;
      for (auto [span, j] : blocks) {
        block_start[{j, s}] = pos;
        pos += static_cast<int>(measure[j]) * (span == 0 ? 2 : 1);
      }
    }
    for (std::size_t j = 0; j < tt.branches.size(); ++j) {
      const Branch& b = tt.branches[j];
      if (b.face != f || measure[j] == 0) continue;
      long m = measure[j];
      for (long k = 0; k < m; ++k) {
        Chord c;
        c.face = f;
        if (b.s1 == b.s2) {
          int p0 = block_start.at({j, b.s1});
          c.a = {b.s1, p0 + static_cast<int>(k)};
          c.b = {b.s1, p0 + static_cast<int>(2 * m - 1 - k)};
        } else {
          c.a = {b.s1, block_start.at({j, b.s1}) + static_cast<int>(k)};
          c.b = {b.s2, block_start.at({j, b.s2}) + static_cast<int>(m - 1 - k)};
        }
        pat.chords.push_back(c);
      }
    }
  }
  validate_pattern(pat);
  return pat;
}

// inverse direction: collapse a pattern to its weighted chord classes
inline std::pair<TrainTrack, std::vector<long>> measured_from_pattern(const Pattern& p) {
  std::map<Branch, long> weight;
  for (const Chord& c : p.chords) {
    Branch b;
    b.face = c.face;
    b.s1 = std::min(c.a.side, c.b.side);
    b.s2 = std::max(c.a.side, c.b.side);
    weight[b]++;
  }
  auto corners = p.cx->corners();
  for (int e = 0; e < p.cx->nedges; ++e)
    if (corners[static_cast<std::size_t>(e)].empty() &&
        p.npoints[static_cast<std::size_t>(e)] > 0) {
      Branch b;
      b.edge = e;
      weight[b] = p.npoints[static_cast<std::size_t>(e)];
    }
  TrainTrack tt;
  tt.cx = p.cx;
  std::vector<long> m;
  for (const auto& [b, w] : weight) {
    tt.branches.push_back(b);
    m.push_back(w);
  }
  return {tt, m};
}

}  // namespace grushko
