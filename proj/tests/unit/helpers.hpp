#pragma once

// shared test utilities: independent brute-force oracles the library results
// are frozen against.

#include <array>
#include <cstdlib>
#include <random>
#include <string>

#include "grushko/oracle.hpp"
#include "grushko/presentation.hpp"

namespace testutil {

using namespace grushko;

inline Presentation P(const std::string& s) { return parse_presentation(s); }

// exact oracle for Z^n / torsion quotients of Z^n via exponent vectors:
// trivial iff each exponent sum is 0 modulo the generator's order (0 = infinite)
inline OracleRef abelian_oracle(int ngens, std::vector<long> orders = {}) {
  orders.resize(static_cast<std::size_t>(ngens), 0);
  return make_function_oracle("abelian", true, [ngens, orders](const Word& w) {
    std::vector<long> e(static_cast<std::size_t>(ngens), 0);
    for (int l : w) e[static_cast<std::size_t>(gen_of(l))] += sign_of(l);
    for (int g = 0; g < ngens; ++g) {
      long m = orders[static_cast<std::size_t>(g)];
      if (m == 0 ? e[g] != 0 : e[g] % m != 0) return Truth::False;
    }
    return Truth::True;
  });
}

// S3 as permutations of {0,1,2}; generator 0 -> (01), generator 1 -> (12)
inline OracleRef s3_oracle() {
  return make_function_oracle("s3-brute", true, [](const Word& w) {
    std::array<int, 3> perm{0, 1, 2};
    auto apply = [&](int a, int b) {
      std::swap(perm[a], perm[b]);
    };
    for (int l : w) {
      // transpositions are involutions, sign irrelevant
      if (gen_of(l) == 0)
        apply(0, 1);
      else
        apply(1, 2);
    }
    return perm == std::array<int, 3>{0, 1, 2} ? Truth::True : Truth::False;
  });
}

// quaternion group Q8 as unit quaternions: gen 0 -> i, gen 1 -> j
inline OracleRef q8_oracle() {
  return make_function_oracle("q8-brute", true, [](const Word& w) {
    // quaternion (a,b,c,d) = a + bi + cj + dk with integer coords
    std::array<int, 4> q{1, 0, 0, 0};
    auto mul = [](std::array<int, 4> x, std::array<int, 4> y) {
      return std::array<int, 4>{
          x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3],
          x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2],
          x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1],
          x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0]};
    };
    for (int l : w) {
      std::array<int, 4> g = gen_of(l) == 0 ? std::array<int, 4>{0, 1, 0, 0}
                                            : std::array<int, 4>{0, 0, 1, 0};
      if (sign_of(l) < 0) g = {-g[0], -g[1], -g[2], -g[3]};  // i^-1 = -i
      q = mul(q, g);
    }
    return q == std::array<int, 4>{1, 0, 0, 0} ? Truth::True : Truth::False;
  });
}

// word problem for <a,b | a^2> = Z/2 * Z: send a^-1 to a, then cancel
// aa and bb^-1 pairs to a normal form
inline OracleRef z2_star_z_oracle() {
  return make_function_oracle("z2*z", true, [](const Word& w0) {
    Word w;
    for (int x : w0) w.push_back(std::abs(x) == 1 ? 1 : x);
    bool changed = true;
    while (changed) {
      changed = false;
      Word out;
      for (int x : w) {
        if (!out.empty() && ((x == 1 && out.back() == 1) || out.back() == -x)) {
          out.pop_back();
          changed = true;
        } else {
          out.push_back(x);
        }
      }
      w = out;
    }
    return w.empty() ? Truth::True : Truth::False;
  });
}

inline std::string env_or(const char* var, const std::string& fallback) {
  const char* v = std::getenv(var);
  return v ? std::string(v) : fallback;
}

inline Word random_word(std::mt19937& rng, int ngens, int maxlen) {
  std::uniform_int_distribution<int> len(0, maxlen), gen(0, ngens - 1), sgn(0, 1);
  Word w;
  int n = len(rng);
  for (int i = 0; i < n; ++i) w.push_back(letter(gen(rng), sgn(rng) ? 1 : -1));
  return w;
}

}  // namespace testutil
