#include <doctest.h>

#include "oracles.hpp"
#include "wiretap/typical.hpp"

using namespace wiretap;

namespace {
// (1 - eps) 2^{n (1 - eps)} < |T| < 2^{n (1 + eps)} for a fair bit with eps = 1/4, in fourth powers.
bool fair_bracket(const BigInt& size, long n) {
  BigInt s4 = size * size * size * size;
  Rational lo = Rational(81, 256) * Rational(pow2(3 * n));
  return Rational(s4) > lo && s4 < pow2(5 * n);
}
}  // namespace

TEST_SUITE("typical") {
  TEST_CASE("Bernoulli(1/4) at n = 8 has 28 typical sequences") {
    Pmf p{Rational(3, 4), Rational(1, 4)};
    auto ref = oracle::typical_by_filter(p, 8, Rational(1, 10));
    CHECK(ref.size() == 28);
    CHECK(typical_set(p, 8, Rational(1, 10)).size() == 28);
    CHECK(typical_set_size(p, 8, Rational(1, 10)) == 28);
  }

  TEST_CASE("enumeration matches the filter oracle") {
    std::vector<Pmf> pmfs{{Rational(1, 2), Rational(1, 2)},
                          {Rational(1, 3), Rational(2, 3)},
                          {Rational(1, 2), Rational(1, 4), Rational(1, 4)}};
    for (const auto& p : pmfs)
      for (int n = 1; n <= 8; ++n)
        for (Rational eps : {Rational(1, 10), Rational(1, 4), Rational(1, 2)}) {
          auto ref = oracle::typical_by_filter(p, n, eps);
          auto got = typical_set(p, n, eps);
          CHECK(got == ref);
          CHECK(typical_set_size(p, n, eps) == BigInt(ref.size()));
          Rational prob = 0;
          for (const auto& x : ref) {
            Rational t = 1;
            for (int v : x) t *= p[v];
            prob += t;
          }
          CHECK(typical_probability(p, n, eps) == prob);
        }
  }

  TEST_CASE("size bracket for a fair bit holds from n = 5") {
    Pmf p{Rational(1, 2), Rational(1, 2)};
    Rational eps(1, 4);
    CHECK_FALSE(fair_bracket(BigInt(oracle::typical_by_filter(p, 4, eps).size()), 4));
    for (long n = 5; n <= 14; ++n) {
      auto size = BigInt(oracle::typical_by_filter(p, static_cast<int>(n), eps).size());
      CHECK(typical_set_size(p, n, eps) == size);
      CHECK(fair_bracket(size, n));
    }
  }

  TEST_CASE("pushforward of typical sequences stays typical") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> out(0, 2);
    std::vector<Pmf> pmfs{{Rational(1, 2), Rational(1, 2)}, {Rational(1, 4), Rational(3, 4)}};
    for (int k = 0; k < 50; ++k) {
      std::vector<int> g{out(rng), out(rng)};
      for (const auto& p : pmfs)
        for (int n = 1; n <= 8; ++n) {
          auto r = pushforward_typicality_check(p, g, n, Rational(1, 10));
          CHECK(r.passed);
          CHECK(r.checked == oracle::typical_by_filter(p, n, Rational(1, 10)).size());
        }
    }
  }

  TEST_CASE("count ranges and sampling mode") {
    Pmf p{Rational(3, 4), Rational(1, 4)};
    auto r = typical_count_ranges(p, 8, Rational(1, 10));
    CHECK(r[0] == std::pair<long, long>{6, 6});
    CHECK(r[1] == std::pair<long, long>{2, 2});
    auto s = pushforward_typicality_check(p, {0, 1}, 8, Rational(1, 10), 500, 3);
    CHECK(s.passed);
    CHECK(s.checked > 0);
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(check_pmf({Rational(1, 2), Rational(1, 3)}), ValidationError);
    CHECK_THROWS_AS(typical_set({Rational(1, 2), Rational(1, 2)}, 30, Rational(1, 10), 1024), CapExceeded);
    CHECK_THROWS_AS(pushforward({Rational(1)}, {-1}), ValidationError);
  }
}
