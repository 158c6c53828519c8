#pragma once

// Common-root extraction for commuting elements, driven entirely by a word
// oracle.  Used by the periodic mergers: two tubular elements that commute
// are (in the torsion-free suitable case) powers of a common root, and the
// gcd staircase below realizes the root as a bounded product of the two.

#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "grushko/oracle.hpp"
#include "grushko/word.hpp"

namespace grushko {

struct NotCommuting : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Monotone staircase from (0,0) to (p,q) where p is minimal nonnegative with
// p*n = gcd(n,m) (mod m) and p*n >= gcd(n,m), q = (p*n - gcd)/m.  Every step
// raises p or q by one and keeps 0 <= p_i*n - q_i*m <= n+m, so each partial
// combination gamma^p delta^-q stays a bounded translation.
inline std::vector<std::pair<long, long>> gcd_sequence(long n, long m) {
  if (n <= 0 || m <= 0) throw std::invalid_argument("gcd_sequence: need positive arguments");
  long d = std::gcd(n, m);
  long p = 0;
  while (p * n % m != d % m || p * n < d) ++p;  // p <= m/d, tiny
  long q = (p * n - d) / m;
  std::vector<std::pair<long, long>> out;
  long pi = 0, qi = 0;
  out.push_back({0, 0});
  while (pi != p || qi != q) {
    long v = pi * n - qi * m;
    if (qi < q && (v >= m || pi == p))
      ++qi;
    else
      ++pi;
    out.push_back({pi, qi});
    long w = pi * n - qi * m;
    if (w < 0 || w > n + m)
      throw std::logic_error("gcd_sequence: staircase left its corridor");
  }
  return out;
}

struct RootSearchResult {
  enum class Kind { Root, NoCommonRoot, Inconclusive };
  Kind kind = Kind::NoCommonRoot;
  // on Kind::Root: gamma = u^n and delta = u^m in the oracle's group
  Word u;
  long n = 0, m = 0;
};

namespace detail {

// extended euclid over possibly-negative longs: g = a*x + b*y, g = gcd >= 0
inline void egcd(long a, long b, long& g, long& x, long& y) {
  long old_r = a, r = b, old_x = 1, xx = 0, old_y = 0, yy = 1;
  while (r != 0) {
    long qq = old_r / r;
    long t = old_r - qq * r;
    old_r = r;
    r = t;
    t = old_x - qq * xx;
    old_x = xx;
    xx = t;
    t = old_y - qq * yy;
    old_y = yy;
    yy = t;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_x = -old_x;
    old_y = -old_y;
  }
  g = old_r;
  x = old_x;
  y = old_y;
}

}  // namespace detail

// Search for a common root of commuting gamma, delta: scans relations
// gamma^a = delta^b with a + |b| bounded by cap, recovers the candidate root
// u = gamma^r delta^s from a Bezout pair, and only answers Root after the
// oracle confirms u^n = gamma and u^m = delta.  NoCommonRoot is relative to
// the cap, which callers set from the translation-length bound.
inline RootSearchResult bulitko_root_search(const Word& gamma, const Word& delta,
                                            const OracleRef& o, long cap) {
  if (cap < 1) throw std::invalid_argument("bulitko_root_search: cap must be positive");
  bool saw_unknown = false;
  auto ask = [&](const Word& w) {
    Truth t = o->is_trivial(w);
    if (t == Truth::Unknown) saw_unknown = true;
    return t;
  };
  Truth comm = ask(commutator(gamma, delta));
  if (comm == Truth::False) throw NotCommuting("bulitko_root_search: arguments do not commute");
  if (comm == Truth::Unknown) return {RootSearchResult::Kind::Inconclusive, {}, 0, 0};

  Truth tg = ask(gamma), td = ask(delta);
  if (tg == Truth::True && td == Truth::True) return {RootSearchResult::Kind::Root, {}, 0, 0};
  if (tg == Truth::True) return {RootSearchResult::Kind::Root, delta, 0, 1};
  if (td == Truth::True) return {RootSearchResult::Kind::Root, gamma, 1, 0};

  // pairs (a,b), a >= 1, 1 <= |b| <= cap, by total size then sign
  for (long total = 2; total <= 2 * cap; ++total) {
    for (long a = 1; a < total && a <= cap; ++a) {
      long babs = total - a;
      if (babs < 1 || babs > cap) continue;
      for (long b : {babs, -babs}) {
        if (ask(free_reduce(concat(power(gamma, a), power(delta, -b)))) != Truth::True) continue;
        long g0 = std::gcd(a, std::abs(b));
        long aa = a / g0, bb = b / g0;  // gamma^aa = delta^bb, coprime
        long g, r, s;
        detail::egcd(bb, aa, g, r, s);  // r*bb + s*aa = 1
        if (g != 1) continue;
        Word u = free_reduce(concat(power(gamma, r), power(delta, s)));
        // exponents: gamma = u^bb, delta = u^aa, modulo oracle confirmation
        if (ask(free_reduce(concat(power(u, bb), inverse(gamma)))) != Truth::True) continue;
        if (ask(free_reduce(concat(power(u, aa), inverse(delta)))) != Truth::True) continue;
        return {RootSearchResult::Kind::Root, u, bb, aa};
      }
    }
  }
  return {saw_unknown ? RootSearchResult::Kind::Inconclusive
                      : RootSearchResult::Kind::NoCommonRoot,
          {},
          0,
          0};
}

}  // namespace grushko
