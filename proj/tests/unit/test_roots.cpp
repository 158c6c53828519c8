#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "grushko/roots.hpp"
#include "helpers.hpp"

using namespace grushko;
using testutil::P;

namespace {

// independent checker for the staircase contract: unit steps from (0,0) to
// the first lattice point realizing the gcd, never leaving the corridor
void check_staircase(long n, long m) {
  auto seq = gcd_sequence(n, m);
  long d = std::gcd(n, m);
  INFO("n=" << n << " m=" << m);
  REQUIRE(!seq.empty());
  CHECK(seq.front() == std::pair<long, long>{0, 0});
  CHECK(seq.back().first * n - seq.back().second * m == d);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto [p, q] = seq[i];
    long v = p * n - q * m;
    CHECK(v >= 0);
    CHECK(v <= n + m);
    // the gcd value appears exactly once, at the end
    if (i + 1 < seq.size()) CHECK(v != d);
    if (i > 0) {
      long dp = p - seq[i - 1].first, dq = q - seq[i - 1].second;
      CHECK(dp + dq == 1);
      CHECK(dp >= 0);
      CHECK(dq >= 0);
    }
  }
  // minimality of the endpoint: no smaller p reaches the gcd with q >= 0
  auto [pe, qe] = seq.back();
  for (long p = 0; p < pe; ++p)
    CHECK((p * n - d < 0 || (p * n - d) % m != 0));
  CHECK(static_cast<long>(seq.size()) == pe + qe + 1);
}

}  // namespace

TEST_CASE("gcd staircase, pinned examples") {
  CHECK(gcd_sequence(1, 1) ==
        std::vector<std::pair<long, long>>{{0, 0}, {1, 0}});
  CHECK(gcd_sequence(7, 3).back() == std::pair<long, long>{1, 2});
  CHECK(gcd_sequence(3, 7).back() == std::pair<long, long>{5, 2});
  CHECK(gcd_sequence(2, 3) ==
        std::vector<std::pair<long, long>>{{0, 0}, {1, 0}, {2, 0}, {2, 1}});
  CHECK(gcd_sequence(4, 6).back() == std::pair<long, long>{2, 1});
  CHECK_THROWS_AS(gcd_sequence(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(gcd_sequence(3, -1), std::invalid_argument);
}

TEST_CASE("gcd staircase, exhaustive small arguments") {
  for (long n = 1; n <= 20; ++n)
    for (long m = 1; m <= 20; ++m) check_staircase(n, m);
}

TEST_CASE("root search recovers the root of proper powers") {
  auto o = oracle_free(P("< a, b | >"));
  Word a{1};
  auto r = bulitko_root_search(power(a, 2), power(a, 3), o, 8);
  REQUIRE(r.kind == RootSearchResult::Kind::Root);
  CHECK(r.u == a);
  CHECK(r.n == 2);
  CHECK(r.m == 3);

  // non-coprime exponents: the search lands on the coprime quotient root
  Word ab = free_reduce(Word{1, 2});
  auto r2 = bulitko_root_search(power(ab, 6), power(ab, 4), o, 12);
  REQUIRE(r2.kind == RootSearchResult::Kind::Root);
  CHECK(r2.u == power(ab, 2));
  CHECK(r2.n == 3);
  CHECK(r2.m == 2);
}

TEST_CASE("root search trivial-argument fast paths") {
  auto o = oracle_free(P("< a | >"));
  Word a{1};
  auto both = bulitko_root_search(Word{}, Word{1, -1}, o, 4);
  CHECK(both.kind == RootSearchResult::Kind::Root);
  CHECK(both.n == 0);
  CHECK(both.m == 0);

  auto left = bulitko_root_search(Word{}, a, o, 4);
  REQUIRE(left.kind == RootSearchResult::Kind::Root);
  CHECK(left.u == a);
  CHECK(left.n == 0);
  CHECK(left.m == 1);

  auto right = bulitko_root_search(a, Word{1, -1, 1, -1}, o, 4);
  REQUIRE(right.kind == RootSearchResult::Kind::Root);
  CHECK(right.u == a);
  CHECK(right.n == 1);
  CHECK(right.m == 0);
}

TEST_CASE("root search refuses non-commuting arguments") {
  auto o = oracle_free(P("< a, b | >"));
  CHECK_THROWS_AS(bulitko_root_search(Word{1}, Word{2}, o, 4), NotCommuting);
}

TEST_CASE("root search on independent commuting elements") {
  // in Z^2 the generators commute but share no root
  auto o = testutil::abelian_oracle(2);
  auto r = bulitko_root_search(Word{1}, Word{2}, o, 6);
  CHECK(r.kind == RootSearchResult::Kind::NoCommonRoot);
}

TEST_CASE("root search through a torsion oracle") {
  // Z/6: a^2 and a^3 have root a; the relation a^2^3 = a^3^2 is found early
  auto o = testutil::abelian_oracle(1, {6});
  Word a{1};
  auto r = bulitko_root_search(power(a, 2), power(a, 3), o, 8);
  REQUIRE(r.kind == RootSearchResult::Kind::Root);
  // oracle only certifies up to the relation; exponents match some root pair
  CHECK(o->is_trivial(free_reduce(concat(power(r.u, r.n), inverse(power(a, 2))))) ==
        Truth::True);
  CHECK(o->is_trivial(free_reduce(concat(power(r.u, r.m), inverse(power(a, 3))))) ==
        Truth::True);
}

TEST_CASE("root search propagates oracle exhaustion") {
  // an oracle that can verify nothing: every answer Unknown
  auto o = make_function_oracle("mute", false, [](const Word&) { return Truth::Unknown; });
  auto r = bulitko_root_search(Word{1, 1}, Word{1, 1, 1}, o, 4);
  CHECK(r.kind == RootSearchResult::Kind::Inconclusive);
}

TEST_CASE("root search inside a hyperbolic surface group") {
  auto p = P("< a, b, c, d | a b a^-1 b^-1 c d c^-1 d^-1 >");
  auto o = oracle_dehn(p);
  Word u{1, 2};
  auto r = bulitko_root_search(power(u, 2), power(u, 5), o, 10);
  REQUIRE(r.kind == RootSearchResult::Kind::Root);
  CHECK(r.u == u);
  CHECK(r.n == 2);
  CHECK(r.m == 5);
}
