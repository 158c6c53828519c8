#pragma once

// Cutting the canonical 2-complex along a two-sided track and reading off the
// induced free-product structure.  The cut complex is an honest CW complex:
// vertices are the base vertex plus two copies (one per side) of every track
// point, edges are the sub-edges between consecutive points plus two parallel
// copies of every chord, faces are the regions a face gets divided into by its
// chords.  Every edge carries a word in the ambient generators so that factor
// inclusions can be written down explicitly.

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "grushko/oracle.hpp"
#include "grushko/pattern.hpp"
#include "grushko/presentation.hpp"

namespace grushko {

struct CutEdge {
  int from = 0, to = 0;
  Word label;  // image in the ambient group
};

struct CutComplex {
  // vertex ids: 0 = base vertex; point (e,pos) with flat index k has
  // minus copy 1+2k and plus copy 2+2k.
  int nverts = 1;
  std::vector<CutEdge> edges;
  std::vector<std::vector<int>> faces;  // entries +-(edge index + 1)
  std::vector<int> point_base;          // flat index offset per ambient edge
};

struct Factor {
  Presentation pres;
  std::vector<Word> injections;  // one ambient word per generator of pres
};

struct Splitting {
  enum class Kind { Amalgam, HNN };
  Kind kind = Kind::Amalgam;
  std::vector<Factor> factors;  // Amalgam: two; HNN: one base factor
  Word stable_letter;           // HNN only
};

namespace detail {

// Walk one face of the ambient complex and list its boundary as
// "atoms": sub-edges (signed cut-edge refs) interleaved with chord endpoint
// slots.  Returns for every boundary position of a point the chord end that
// occupies it, plus the arc (list of signed sub-edge refs) between
// consecutive point slots.
struct FaceNode {
  int side = 0, spos = 0;  // boundary position of the occupying chord end
  int chord = -1;          // chord index within the pattern
  bool second_end = false; // true if this is chord.b
};

inline int subedge_index(const CutComplex& cc, const Pattern& p, int e, int k) {
  // sub-edges were created first, edge e contributing npoints[e]+1 of them
  int off = 0;
  for (int i = 0; i < e; i++) off += p.npoints[i] + 1;
  (void)cc;
  return off + k;
}

}  // namespace detail

// Cut the canonical complex along a (two-sided) pattern.  The pattern should
// normally consist of a single track; use restrict_to_track first.
inline CutComplex cut_along_pattern(const Pattern& p) {
  validate_pattern(p);
  const TwoComplex& cx = *p.cx;
  CutComplex cc;

  // vertex layout
  cc.point_base.assign(cx.nedges, 0);
  int flat = 0;
  for (int e = 0; e < cx.nedges; e++) {
    cc.point_base[e] = flat;
    flat += p.npoints[e];
  }
  cc.nverts = 1 + 2 * flat;
  auto vminus = [&](int e, int pos) { return 1 + 2 * (cc.point_base[e] + pos); };
  auto vplus = [&](int e, int pos) { return 2 + 2 * (cc.point_base[e] + pos); };

  // sub-edges: S(e,k), k = 0..n(e); S(e,k) runs from the plus copy of point
  // k-1 to the minus copy of point k (base vertex at the extremes).  Only the
  // last one carries the generator letter.
  for (int e = 0; e < cx.nedges; e++) {
    int n = p.npoints[e];
    for (int k = 0; k <= n; k++) {
      CutEdge ed;
      ed.from = (k == 0) ? 0 : vplus(e, k - 1);
      ed.to = (k == n) ? 0 : vminus(e, k);
      if (k == n) ed.label = Word{letter(e, +1)};
      cc.edges.push_back(ed);
    }
  }

  // chord copies: for each chord two parallel edges, one per side of the
  // track.  Side assignment of the copies at each end follows the transverse
  // orientation: the "A" copy touches, at end x, the plus copy iff the
  // forward direction along the boundary there points toward the edge target.
  auto orient = transverse_orientation(p);  // per chord: false = as computed, true = flipped
  if (!orient)
    throw PatternError("cut_along_pattern: pattern is one-sided");
  int chord_edge0 = (int)cc.edges.size();
  for (int ci = 0; ci < (int)p.chords.size(); ci++) {
    const Chord& c = p.chords[ci];
    auto [ea, pa] = p.end_point(c, false);
    auto [eb, pb] = p.end_point(c, true);
    bool ta = end_toward_target(p, c, false);
    bool tb = end_toward_target(p, c, true);
    if ((*orient)[ci]) { ta = !ta; tb = !tb; }
    Word w = chord_word(p, c);
    CutEdge A, B;  // copy A on the "toward" side, B opposite
    A.from = ta ? vplus(ea, pa) : vminus(ea, pa);
    A.to = tb ? vplus(eb, pb) : vminus(eb, pb);
    B.from = ta ? vminus(ea, pa) : vplus(ea, pa);
    B.to = tb ? vminus(eb, pb) : vplus(eb, pb);
    A.label = w;
    B.label = w;
    cc.edges.push_back(A);
    cc.edges.push_back(B);
  }
  auto copyA = [&](int ci) { return chord_edge0 + 2 * ci; };
  auto copyB = [&](int ci) { return chord_edge0 + 2 * ci + 1; };

  // faces: walk each ambient face; chords cut it into regions.  Nodes are the
  // point slots in boundary order; arc i joins node i to node i+1.
  for (int f = 0; f < (int)cx.faces.size(); f++) {
    const Word& face = cx.faces[f];
    // boundary nodes and arcs
    std::vector<detail::FaceNode> nodes;
    std::vector<std::vector<int>> arcs;  // signed sub-edge refs, arc i after node i
    std::vector<int> arc0;               // atoms before the first node
    std::vector<int>* cur = &arc0;
    for (int s = 0; s < (int)face.size(); s++) {
      int e = gen_of(face[s]);
      int sg = sign_of(face[s]);
      int n = p.npoints[e];
      for (int t = 0; t <= n; t++) {
        int k = (sg > 0) ? t : n - t;  // sub-edge index in traversal order
        cur->push_back(sg * (detail::subedge_index(cc, p, e, k) + 1));
        if (t < n) {
          detail::FaceNode nd;
          nd.side = s;
          nd.spos = t;
          nodes.push_back(nd);
          arcs.emplace_back();
          cur = &arcs.back();
        }
      }
    }
    if (nodes.empty()) {
      cc.faces.push_back(arc0);
      continue;
    }
    // close the cycle: the leading atoms belong after the last node
    arcs.back().insert(arcs.back().end(), arc0.begin(), arc0.end());
    // match chord ends to nodes
    for (int ci = 0; ci < (int)p.chords.size(); ci++) {
      const Chord& c = p.chords[ci];
      if (c.face != f) continue;
      for (int h = 0; h < 2; h++) {
        const ChordEnd& en = h ? c.b : c.a;
        for (int ni = 0; ni < (int)nodes.size(); ni++)
          if (nodes[ni].side == en.side && nodes[ni].spos == en.spos) {
            nodes[ni].chord = ci;
            nodes[ni].second_end = h;
          }
      }
    }
    for (auto& nd : nodes)
      if (nd.chord < 0) throw PatternError("cut_along_pattern: uncovered point slot");
    std::map<std::pair<int, bool>, int> node_of_end;
    for (int ni = 0; ni < (int)nodes.size(); ni++)
      node_of_end[{nodes[ni].chord, nodes[ni].second_end}] = ni;

    // region walk: each region uses arcs forward; after arc i it crosses the
    // chord at node i+1 to the partner node j and continues with arc j.
    int N = (int)nodes.size();
    std::vector<bool> used(N, false);
    for (int start = 0; start < N; start++) {
      if (used[start]) continue;
      std::vector<int> boundary;
      int i = start;
      do {
        used[i] = true;
        boundary.insert(boundary.end(), arcs[i].begin(), arcs[i].end());
        const detail::FaceNode& nd = nodes[(i + 1) % N];
        int ci = nd.chord;
        int j = node_of_end[{ci, !nd.second_end}];
        // crossing from nd to the partner end.  Traversal from the later end
        // (b) to the earlier (a) stays on the intrinsic A side and a -> b on
        // the B side; if the chord's orientation was flipped for global
        // consistency the copies swap roles.
        bool use_a = nd.second_end != (*orient)[ci];
        int copy = use_a ? copyA(ci) : copyB(ci);
        boundary.push_back(nd.second_end ? -(copy + 1) : copy + 1);
        i = j;
      } while (i != start);
      cc.faces.push_back(boundary);
    }
  }

  // sanity: boundaries must be closed edge paths
  for (const auto& bd : cc.faces) {
    if (bd.empty()) continue;
    auto src = [&](int a) { return a > 0 ? cc.edges[a - 1].from : cc.edges[-a - 1].to; };
    auto dst = [&](int a) { return a > 0 ? cc.edges[a - 1].to : cc.edges[-a - 1].from; };
    for (size_t i = 0; i < bd.size(); i++) {
      if (dst(bd[i]) != src(bd[(i + 1) % bd.size()]))
        throw std::logic_error("cut_along_pattern: region boundary not closed");
    }
  }
  return cc;
}

namespace detail {

struct CutDSU {
  std::vector<int> up;
  explicit CutDSU(int n) : up(n) { for (int i = 0; i < n; i++) up[i] = i; }
  int find(int x) { while (up[x] != x) x = up[x] = up[up[x]]; return x; }
  void unite(int a, int b) { up[find(a)] = find(b); }
};

}  // namespace detail

// Read off the free-product structure from a cut complex.  One component:
// HNN extension of the component group over the trivial group (the stable
// letter crosses the removed track once).  Two components: amalgam over the
// trivial group.  More than two cannot happen for a connected track.
//
// The factors are the pieces with each boundary copy of the track coned off.
// Concretely that adds, per copy, one relator for every independent loop of
// the copy graph.  When the track group is trivial in the ambient group
// (the only case a caller should split along), coning changes nothing
// upstairs and G really is the free product of the capped pieces; otherwise
// the extra relators have nontrivial images and verify_splitting fails.
inline Splitting splitting_from_cut(const CutComplex& cc, const Pattern& p) {
  detail::CutDSU dsu(cc.nverts);
  for (const auto& e : cc.edges) dsu.unite(e.from, e.to);
  std::vector<int> comp_of(cc.nverts, -1);
  std::vector<int> roots;
  for (int v = 0; v < cc.nverts; v++) {
    int r = dsu.find(v);
    bool seen = false;
    for (int q : roots) if (q == r) { seen = true; break; }
    if (!seen) roots.push_back(r);
  }
  // base vertex's component first
  std::stable_sort(roots.begin(), roots.end(), [&](int a, int b) {
    return (a == dsu.find(0)) > (b == dsu.find(0));
  });
  for (int v = 0; v < cc.nverts; v++)
    for (int k = 0; k < (int)roots.size(); k++)
      if (dsu.find(v) == roots[k]) comp_of[v] = k;
  int ncomp = (int)roots.size();
  if (ncomp > 2)
    throw std::logic_error("splitting_from_cut: more than two complementary pieces");

  Splitting out;
  out.kind = (ncomp == 1) ? Splitting::Kind::HNN : Splitting::Kind::Amalgam;

  // spanning tree per component (BFS from the smallest vertex), with the word
  // labelling the tree path from the root
  std::vector<int> tree_edge(cc.edges.size(), 0);  // 1 if in some tree
  std::vector<Word> pathword(cc.nverts);
  std::vector<bool> reached(cc.nverts, false);
  std::vector<std::vector<std::pair<int, int>>> adj(cc.nverts);  // (edge, dir)
  for (int ei = 0; ei < (int)cc.edges.size(); ei++) {
    adj[cc.edges[ei].from].push_back({ei, +1});
    adj[cc.edges[ei].to].push_back({ei, -1});
  }
  std::vector<int> comp_root(ncomp, -1);
  for (int v = 0; v < cc.nverts; v++)
    if (comp_root[comp_of[v]] < 0) comp_root[comp_of[v]] = v;
  for (int k = 0; k < ncomp; k++) {
    std::vector<int> queue{comp_root[k]};
    reached[comp_root[k]] = true;
    for (size_t qi = 0; qi < queue.size(); qi++) {
      int v = queue[qi];
      for (auto [ei, dir] : adj[v]) {
        int w = dir > 0 ? cc.edges[ei].to : cc.edges[ei].from;
        if (reached[w]) continue;
        reached[w] = true;
        tree_edge[ei] = 1;
        Word step = dir > 0 ? cc.edges[ei].label : inverse(cc.edges[ei].label);
        pathword[w] = free_reduce(concat(pathword[v], step));
        queue.push_back(w);
      }
    }
  }

  // generators: non-tree edges, grouped by component
  std::vector<int> gen_index(cc.edges.size(), -1);
  std::vector<std::vector<int>> comp_gens(ncomp);
  for (int ei = 0; ei < (int)cc.edges.size(); ei++) {
    if (tree_edge[ei]) continue;
    int k = comp_of[cc.edges[ei].from];
    gen_index[ei] = (int)comp_gens[k].size();
    comp_gens[k].push_back(ei);
  }

  for (int k = 0; k < ncomp; k++) {
    Factor fac;
    fac.pres.ngens = (int)comp_gens[k].size();
    fac.pres.names.clear();
    for (int g = 0; g < fac.pres.ngens; g++)
      fac.pres.names.push_back("x" + std::to_string(g + 1));
    for (int g = 0; g < fac.pres.ngens; g++) {
      int ei = comp_gens[k][g];
      Word inj = concat(pathword[cc.edges[ei].from], cc.edges[ei].label);
      inj = free_reduce(concat(inj, inverse(pathword[cc.edges[ei].to])));
      fac.injections.push_back(inj);
    }
    out.factors.push_back(fac);
  }
  // relators: each region becomes a relator of the component it lives in;
  // empty boundaries (an empty ambient relator) belong to the base component
  for (const auto& bd : cc.faces) {
    int k = 0;
    Word rel;
    for (int a : bd) {
      int ei = a > 0 ? a - 1 : -a - 1;
      k = comp_of[cc.edges[ei].from];
      if (tree_edge[ei]) continue;
      rel.push_back(a > 0 ? letter(gen_index[ei], +1) : letter(gen_index[ei], -1));
    }
    rel = free_reduce(rel);
    out.factors[k].pres.relators.push_back(rel);
  }

  // cap relators: independent loops of each boundary copy of the track,
  // written in the factor generators
  int npts = ((cc.nverts - 1) / 2);
  int nchords = (int)p.chords.size();
  int chord_edge0 = (int)cc.edges.size() - 2 * nchords;
  auto to_letters = [&](const std::vector<int>& path, Word& rel) {
    for (int a : path) {
      int ei = a > 0 ? a - 1 : -a - 1;
      if (tree_edge[ei]) continue;
      rel.push_back(a > 0 ? letter(gen_index[ei], +1) : letter(gen_index[ei], -1));
    }
  };
  for (int side = 0; side < 2 && npts > 0; side++) {
    // copy graph: point copies on this side, joined by this side's chord copies
    std::vector<std::vector<std::pair<int, int>>> cadj(cc.nverts);  // (edge, dir)
    std::vector<int> cverts;
    for (int ci = 0; ci < nchords; ci++) {
      int ei = chord_edge0 + 2 * ci + side;
      cadj[cc.edges[ei].from].push_back({ei, +1});
      cadj[cc.edges[ei].to].push_back({ei, -1});
      cverts.push_back(cc.edges[ei].from);
      cverts.push_back(cc.edges[ei].to);
    }
    if (cverts.empty()) continue;  // point track: copies are single vertices
    std::sort(cverts.begin(), cverts.end());
    cverts.erase(std::unique(cverts.begin(), cverts.end()), cverts.end());
    std::map<int, std::vector<int>> cpath;  // copy vertex -> path of signed refs
    std::vector<int> ctree(cc.edges.size(), 0);
    for (int root : cverts) {
      if (cpath.count(root)) continue;
      cpath[root] = {};
      std::vector<int> queue{root};
      for (size_t qi = 0; qi < queue.size(); qi++) {
        int v = queue[qi];
        for (auto [ei, dir] : cadj[v]) {
          int w = dir > 0 ? cc.edges[ei].to : cc.edges[ei].from;
          if (cpath.count(w)) continue;
          ctree[ei] = 1;
          cpath[w] = cpath[v];
          cpath[w].push_back(dir > 0 ? ei + 1 : -(ei + 1));
          queue.push_back(w);
        }
      }
    }
    for (int ci = 0; ci < nchords; ci++) {
      int ei = chord_edge0 + 2 * ci + side;
      if (ctree[ei]) continue;
      Word rel;
      to_letters(cpath.at(cc.edges[ei].from), rel);
      if (!tree_edge[ei])
        rel.push_back(letter(gen_index[ei], +1));
      std::vector<int> back = cpath.at(cc.edges[ei].to);
      std::reverse(back.begin(), back.end());
      for (int& a : back) a = -a;
      to_letters(back, rel);
      rel = free_reduce(rel);
      if (!rel.empty())
        out.factors[comp_of[cc.edges[ei].from]].pres.relators.push_back(rel);
    }
  }
  for (auto& fac : out.factors) fac.pres.check();

  if (out.kind == Splitting::Kind::HNN) {
    // the stable letter crosses the track at its first point: tree path to the
    // minus copy, across, tree path back from the plus copy
    int e0 = -1;
    for (int e = 0; e < (int)p.npoints.size(); e++)
      if (p.npoints[e] > 0) { e0 = e; break; }
    if (e0 < 0) throw std::logic_error("splitting_from_cut: HNN with empty track");
    int vm = 1 + 2 * cc.point_base[e0];
    int vp = vm + 1;
    out.stable_letter =
        free_reduce(concat(pathword[vm], inverse(pathword[vp])));
  }
  return out;
}

inline Splitting split_along_track(const Pattern& p, const Track& t) {
  Pattern restricted = restrict_to_track(p, t);
  CutComplex cc = cut_along_pattern(restricted);
  return splitting_from_cut(cc, restricted);
}

// A splitting is a genuine free-product decomposition certificate only when
// it is essential: for an amalgam both factors must be nontrivial in the
// ambient group, for an HNN extension the base must be nontrivial (otherwise
// the whole group is just Z and splits no further).
inline Truth is_essential_splitting(const Splitting& s, const WordOracle& oracle) {
  if (s.kind == Splitting::Kind::HNN) {
    Truth triv = subgroup_is_trivial(s.factors[0].injections, oracle);
    if (triv == Truth::True) return Truth::False;
    if (triv == Truth::False) return Truth::True;
    return Truth::Unknown;
  }
  Truth worst = Truth::True;
  for (const auto& fac : s.factors) {
    Truth triv = subgroup_is_trivial(fac.injections, oracle);
    if (triv == Truth::True) return Truth::False;
    if (triv == Truth::Unknown) worst = Truth::Unknown;
  }
  return worst;
}

// Soundness checks on a claimed splitting of `parent`:
//  - factor relators map to trivial ambient words (oracle),
//  - abelianizations add up (plus one Z for the stable letter of an HNN).
inline Truth verify_splitting(const Splitting& s, const Presentation& parent,
                              const WordOracle& oracle) {
  Truth all = Truth::True;
  for (const auto& fac : s.factors) {
    if ((int)fac.injections.size() != fac.pres.ngens) return Truth::False;
    for (const Word& r : fac.pres.relators) {
      Word image;
      for (int a : r) {
        Word g = fac.injections[gen_of(a)];
        image = concat(image, sign_of(a) > 0 ? g : inverse(g));
      }
      Truth t = oracle.is_trivial(image);
      if (t == Truth::False) return Truth::False;
      if (t == Truth::Unknown) all = Truth::Unknown;
    }
  }
  AbelianInvariants want = abelianization(parent);
  std::vector<AbelianInvariants> parts;
  for (const auto& fac : s.factors) {
    // invariants of the factor as an abstract group
    parts.push_back(abelianization(fac.pres));
  }
  if (s.kind == Splitting::Kind::HNN) {
    AbelianInvariants z;
    z.free_rank = 1;
    parts.push_back(z);
  }
  AbelianInvariants got;
  for (const auto& pt : parts) got = abelian_sum(got, pt);
  if (!(got.free_rank == want.free_rank && got.torsion == want.torsion))
    return Truth::False;
  return all;
}

}  // namespace grushko
