#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "grushko/splitting.hpp"
#include "grushko/traintrack.hpp"
#include "helpers.hpp"

using namespace grushko;
using testutil::P;

namespace {

Branch chord_class(int face, int s1, int s2) {
  Branch b;
  b.face = face;
  b.s1 = s1;
  b.s2 = s2;
  return b;
}

Branch bare_class(int edge) {
  Branch b;
  b.edge = edge;
  return b;
}

std::vector<std::pair<Branch, long>> support(const TrainTrack& tt,
                                             const std::vector<long>& m) {
  std::vector<std::pair<Branch, long>> out;
  for (std::size_t j = 0; j < tt.branches.size(); ++j)
    if (m[j] != 0) out.push_back({tt.branches[j], m[j]});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("branch crossing") {
  Branch a = chord_class(0, 0, 2), b = chord_class(0, 1, 3);
  REQUIRE(branches_cross(a, b));
  REQUIRE(branches_cross(b, a));
  // shared side: nestable
  REQUIRE_FALSE(branches_cross(chord_class(0, 1, 3), chord_class(0, 1, 4)));
  // same-side class crosses nothing
  REQUIRE_FALSE(branches_cross(chord_class(0, 1, 1), chord_class(0, 0, 2)));
  // different faces never interact
  REQUIRE_FALSE(branches_cross(chord_class(0, 0, 2), chord_class(1, 1, 3)));
}

TEST_CASE("page system of the Baumslag-Solitar complex has only the zero weighting") {
  // face boundary t^-1 x t x^-2: the x-midpoint book has three pages, and the
  // two-branch switch forces m1+m2 = m1 = m2
  Presentation bs = P("< x, t | t^-1 x t x^-2 >");
  TwoComplex cx = canonical_complex(bs);
  TrainTrack tt;
  tt.cx = &cx;
  tt.branches = {chord_class(0, 1, 3), chord_class(0, 1, 4)};
  REQUIRE_NOTHROW(validate_traintrack(tt));

  // rows are consecutive page differences on the x-midpoint; the untouched
  // t-midpoint contributes nothing
  PageSystem ps = page_system(tt);
  REQUIRE(ps.rows == IntMatrix{{Int(0), Int(1)}, {Int(1), Int(-1)}});

  REQUIRE_FALSE(is_formally_consistent(tt));
  REQUIRE(solve_measures(tt, 10).empty());

  // this switch configuration survives the combinatorial filters and is
  // reachable by the enumerator
  bool found = false;
  for (const TrainTrack& cand : enumerate_train_tracks(cx))
    if (cand.branches == tt.branches) found = true;
  REQUIRE(found);
}

TEST_CASE("torus circles") {
  Presentation torus = P("< a, b | a b a^-1 b^-1 >");
  TwoComplex cx = canonical_complex(torus);

  SECTION("opposite sides carry weight") {
    TrainTrack tt;
    tt.cx = &cx;
    tt.branches = {chord_class(0, 0, 2)};
    REQUIRE(is_formally_consistent(tt));
    auto sols = solve_measures(tt, 2);
    REQUIRE(sols == std::vector<std::vector<long>>{{1}, {2}});

    Pattern one = pattern_from_measured(tt, {1});
    REQUIRE(components(one).size() == 1);
    REQUIRE(is_two_sided(one, components(one)[0]));

    // weight two: a pair of parallel circles
    Pattern two = pattern_from_measured(tt, {2});
    auto tracks = components(two);
    REQUIRE(tracks.size() == 2);
    for (const auto& t : tracks) REQUIRE(t.length() == 1);
  }
  SECTION("corner class alone cannot close up") {
    TrainTrack tt;
    tt.cx = &cx;
    tt.branches = {chord_class(0, 0, 1)};
    REQUIRE_FALSE(is_formally_consistent(tt));
  }
  SECTION("crossing pair is rejected") {
    TrainTrack tt;
    tt.cx = &cx;
    tt.branches = {chord_class(0, 0, 2), chord_class(0, 1, 3)};
    REQUIRE_THROWS_AS(validate_traintrack(tt), std::invalid_argument);
  }
}

TEST_CASE("free group train tracks are bare points") {
  Presentation f2 = P("< a, b | >");
  TwoComplex cx = canonical_complex(f2);
  auto classes = all_chord_classes(cx);
  REQUIRE(classes == std::vector<Branch>{bare_class(0), bare_class(1)});
  REQUIRE(enumerate_train_tracks(cx).size() == 3);

  Presentation z = P("< a | >");
  TwoComplex zc = canonical_complex(z);
  auto zt = enumerate_train_tracks(zc);
  REQUIRE(zt.size() == 1);
  REQUIRE(zt[0].branches == std::vector<Branch>{bare_class(0)});

  TrainTrack tt;
  tt.cx = &cx;
  tt.branches = {bare_class(0)};
  REQUIRE(is_formally_consistent(tt));
  Pattern pat = pattern_from_measured(tt, {1});
  REQUIRE(pat.npoints == std::vector<int>{1, 0});
  REQUIRE(pat.chords.empty());
}

TEST_CASE("measured tracks on Z/2 * Z") {
  Presentation g = P("< a, b | a^2 >");
  TwoComplex cx = canonical_complex(g);
  TrainTrack tt;
  tt.cx = &cx;
  tt.branches = {chord_class(0, 0, 0), chord_class(0, 0, 1), chord_class(0, 1, 1)};
  REQUIRE_NOTHROW(validate_traintrack(tt));
  REQUIRE(is_formally_consistent(tt));

  // page balance forces equal corner weights
  auto sols = solve_measures(tt, 1);
  REQUIRE(sols == std::vector<std::vector<long>>{{0, 1, 0}, {1, 0, 1}, {1, 1, 1}});

  SECTION("single crossing chord is the one-sided core circle") {
    Pattern pat = pattern_from_measured(tt, {0, 1, 0});
    auto tracks = components(pat);
    REQUIRE(tracks.size() == 1);
    REQUIRE_FALSE(is_two_sided(pat, tracks[0]));
  }
  SECTION("corner pair bounds a disc") {
    Pattern pat = pattern_from_measured(tt, {1, 0, 1});
    REQUIRE(pat.chords.size() == 2);
    auto tracks = components(pat);
    REQUIRE(tracks.size() == 1);
    REQUIRE(is_two_sided(pat, tracks[0]));
    for (const Word& w : track_group_generators(pat, tracks[0]))
      REQUIRE(free_reduce(w).empty());
  }
  SECTION("doubled crossing chord splits off the torsion factor") {
    Pattern pat = pattern_from_measured(tt, {0, 2, 0});
    auto tracks = components(pat);
    REQUIRE(tracks.size() == 1);
    REQUIRE(tracks[0].length() == 2);
    REQUIRE(is_two_sided(pat, tracks[0]));

    auto oracle = testutil::z2_star_z_oracle();
    // boundary of the Moebius neighbourhood of a: its group is <a^2> = 1 in G
    for (const Word& w : track_group_generators(pat, tracks[0]))
      REQUIRE(oracle->is_trivial(w) == Truth::True);

    Splitting s = split_along_track(pat, tracks[0]);
    REQUIRE(s.kind == Splitting::Kind::Amalgam);
    REQUIRE(is_essential_splitting(s, *oracle) == Truth::True);
    REQUIRE(verify_splitting(s, g, *oracle) == Truth::True);

    std::vector<AbelianInvariants> ab;
    for (const auto& fac : s.factors) ab.push_back(abelianization(fac.pres));
    std::sort(ab.begin(), ab.end(), [](const auto& x, const auto& y) {
      return x.free_rank < y.free_rank;
    });
    REQUIRE(ab[0].free_rank == 0);
    REQUIRE(ab[0].torsion == std::vector<Int>{Int(2)});
    REQUIRE(ab[1].free_rank == 1);
    REQUIRE(ab[1].torsion.empty());
  }
}

TEST_CASE("measured pattern round trip") {
  for (const char* src : {"< a, b | a^2 >", "< a, b | a b a^-1 b^-1 >", "< a, b | >",
                          "< a | a^3 >"}) {
    Presentation p = P(src);
    TwoComplex cx = canonical_complex(p);
    for (const TrainTrack& tt : enumerate_train_tracks(cx)) {
      for (const auto& m : solve_measures(tt, 2)) {
        Pattern pat = pattern_from_measured(tt, m);  // validates internally
        auto [tt2, m2] = measured_from_pattern(pat);
        REQUIRE(support(tt2, m2) == support(tt, m));
      }
    }
  }
}
