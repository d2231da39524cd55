#include <doctest.h>

#include <numeric>
#include <set>

#include "oracles.hpp"
#include "wiretap/extractor.hpp"

using namespace wiretap;

namespace {
// Output of the Toeplitz hash straight from T[i][j] = v[i - j + n1 - 1].
std::vector<int> toeplitz_ref(int n1, int n3, const std::vector<int>& t, const std::vector<int>& v) {
  std::vector<int> out(n3, 0);
  for (int i = 0; i < n3; ++i)
    for (int j = 0; j < n1; ++j) out[i] ^= v[i - j + n1 - 1] & t[j];
  return out;
}

std::vector<int> bits_of(std::uint64_t x, int n) {
  std::vector<int> b(n);
  for (int i = 0; i < n; ++i) b[i] = x >> i & 1;
  return b;
}

std::uint64_t pack(const std::vector<int>& b) {
  std::uint64_t x = 0;
  for (std::size_t i = 0; i < b.size(); ++i) x |= std::uint64_t(b[i]) << i;
  return x;
}

// d_TV([V, E(T, V)], uniform) for T uniform on the support, from the reference hash.
Rational flat_dtv_ref(int n1, int n3, const std::vector<std::uint64_t>& support) {
  const int n2 = n1 + n3 - 1;
  Rational total = 0;
  for (std::uint64_t v = 0; v < (std::uint64_t(1) << n2); ++v) {
    std::map<std::uint64_t, long> cnt;
    for (auto t : support) ++cnt[pack(toeplitz_ref(n1, n3, bits_of(t, n1), bits_of(v, n2)))];
    Rational d = 0;
    const Rational u(1, 1L << n3);
    long seen = 0;
    for (auto& [z, c] : cnt) {
      d += abs(Rational(c, static_cast<long>(support.size())) - u);
      ++seen;
    }
    d += (Rational(1L << n3) - seen) * u;
    total += d / 2;
  }
  return total / Rational(pow2(n2));
}

std::vector<std::uint64_t> random_support(std::mt19937_64& rng, int n1, int k) {
  std::vector<std::uint64_t> all(std::size_t(1) << n1);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::size_t(1) << k);
  std::sort(all.begin(), all.end());
  return all;
}
}  // namespace

TEST_SUITE("extractor") {
  TEST_CASE("output length formula") {
    CHECK(extractor_output_length(12, Rational(3, 4), Rational(1, 8)) == 3);
    auto ex = make_extractor(12, Rational(3, 4), Rational(1, 8));
    CHECK(ex.n3 == 3);
    CHECK(ex.n2 == 14);
    auto big = make_extractor(32, Rational(3, 4), Rational(1, 16));
    CHECK(big.n3 == 16);
    CHECK(big.n2 == 47);
    // irrational log: floor(10 * 7/10 - 2 log2 3) = floor(3.83) = 3
    CHECK(extractor_output_length(10, Rational(7, 10), Rational(1, 3)) == 3);
    CHECK(extractor_output_length(12, Rational(3, 4), Rational(1, 8), 1) == 2);
  }

  TEST_CASE("empty output is a sizing error that echoes the formula") {
    try {
      make_extractor(4, Rational(1, 2), Rational(1, 8));
      FAIL("expected SizingError");
    } catch (const SizingError& e) {
      std::string msg = e.what();
      CHECK(msg.find("floor(delta*n1 - 2*log2(1/eps))") != std::string::npos);
      CHECK(msg.find("= -4") != std::string::npos);
    }
  }

  TEST_CASE("Toeplitz hash matches its definition") {
    std::mt19937_64 rng(1);
    for (int n1 = 1; n1 <= 12; ++n1)
      for (int n3 = 1; n3 <= n1; ++n3) {
        auto ex = make_extractor_with_length(n1, n3);
        for (int k = 0; k < 20; ++k) {
          std::uint64_t t = rng() & ((1ULL << n1) - 1), v = rng() & ((1ULL << ex.n2) - 1);
          auto ref = pack(toeplitz_ref(n1, n3, bits_of(t, n1), bits_of(v, ex.n2)));
          CHECK(extract(ex, t, v) == ref);
          CHECK(extract(ex, Bits::from_uint(n1, t), Bits::from_uint(ex.n2, v)).to_uint() == ref);
        }
      }
  }

  TEST_CASE("linearity over every input for n1 <= 12") {
    std::mt19937_64 rng(2);
    for (auto layout : {HashLayout::Toeplitz, HashLayout::IdentityToeplitz})
      for (int n1 = 1; n1 <= 12; ++n1) {
        int n3 = std::max(1, n1 / 2);
        auto ex = make_extractor_with_length(n1, n3, layout);
        for (int k = 0; k < 3; ++k) {
          std::uint64_t v = ex.n2 ? rng() & ((1ULL << ex.n2) - 1) : 0;
          std::vector<std::uint64_t> basis(n1);
          for (int j = 0; j < n1; ++j) basis[j] = extract(ex, 1ULL << j, v);
          for (std::uint64_t t = 0; t < (1ULL << n1); ++t) {
            std::uint64_t want = 0;
            for (int j = 0; j < n1; ++j)
              if (t >> j & 1) want ^= basis[j];
            CHECK(extract(ex, t, v) == want);
          }
        }
      }
  }

  TEST_CASE("collision probability at most 2^-n3") {
    for (auto layout : {HashLayout::Toeplitz, HashLayout::IdentityToeplitz}) {
      auto ex = make_extractor_with_length(6, 3, layout);
      const std::uint64_t seeds = 1ULL << ex.n2;
      for (std::uint64_t a = 0; a < 64; ++a)
        for (std::uint64_t b = a + 1; b < 64; ++b) {
          std::uint64_t coll = 0;
          for (std::uint64_t v = 0; v < seeds; ++v) coll += extract(ex, a, v) == extract(ex, b, v);
          CHECK(coll * 8 <= seeds);
          if (layout == HashLayout::Toeplitz) CHECK(coll * 8 == seeds);
        }
    }
  }

  TEST_CASE("identity layout is full rank for every seed") {
    auto ex = make_extractor_with_length(10, 4, HashLayout::IdentityToeplitz);
    CHECK(ex.n2 == 9);
    for (std::uint64_t v = 0; v < (1ULL << ex.n2); ++v) CHECK(gf2_rank(extractor_rows(ex, v)) == 4);
    CHECK(make_extractor_with_length(5, 5, HashLayout::IdentityToeplitz).n2 == 0);
  }

  TEST_CASE("flat sources: exact distance matches the reference") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 3; ++k) {
      auto support = random_support(rng, 8, 6);
      auto ex = make_extractor(8, Rational(3, 4), Rational(1, 2));
      auto r = flat_source_check(ex, support, 2);
      CHECK(r.dtv == flat_dtv_ref(8, ex.n3, support));
      CHECK(r.dtv <= Rational(1, 2));
    }
  }

  TEST_CASE("flat sources of min-entropy 9 at n1 = 12") {
    std::mt19937_64 rng(4);
    auto ex = make_extractor(12, Rational(3, 4), Rational(1, 8));
    for (int k = 0; k < 5; ++k) {
      auto r = flat_source_check(ex, random_support(rng, 12, 9), 4);
      CHECK(r.dtv <= Rational(1, 8));
      CHECK(r.cond_entropy >= r.entropy_floor);
    }
  }

  TEST_CASE("job count does not change the result") {
    std::mt19937_64 rng(5);
    auto ex = make_extractor(12, Rational(3, 4), Rational(1, 8));
    auto s = random_support(rng, 12, 9);
    auto a = flat_source_check(ex, s, 1), b = flat_source_check(ex, s, 7);
    CHECK(a.dtv == b.dtv);
    CHECK(a.cond_entropy == b.cond_entropy);
  }

  TEST_CASE("bits helpers") {
    auto b = Bits::parse("1011");
    CHECK(b.to_uint() == 0b1101);
    CHECK(b.str() == "1011");
    CHECK(gf2_rank({0b11, 0b01, 0b10}) == 2);
    CHECK(gf2_span({0b11, 0b01}).size() == 4);
  }
}
