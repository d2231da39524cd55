#pragma once
#include <cstdint>
#include <random>
#include <vector>

#include "wiretap/gf2.hpp"
#include "wiretap/rational.hpp"

namespace wiretap {

// Toeplitz: T[i][j] = v[i - j + n1 - 1], seed n1 + n3 - 1 bits.
// IdentityToeplitz: [I | T] with T an n3 x (n1 - n3) Toeplitz block, seed n1 - 1 bits;
// full rank for every seed.
enum class HashLayout { Toeplitz, IdentityToeplitz };
const char* layout_name(HashLayout h);

struct Extractor {
  HashLayout layout = HashLayout::Toeplitz;
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
  Rational delta;  // min-entropy rate the extractor is sized for
  Rational eps;
  int c = 0;
};

// floor(delta * n1 - 2 log2(1/eps)) - c, computed exactly.
long extractor_output_length(int n1, const Rational& delta, const Rational& eps, int c = 0);

// Throws SizingError (with the length formula) when the output would be empty.
Extractor make_extractor(int n1, const Rational& delta, const Rational& eps, int c = 0);
// Extractor with a forced output length.
Extractor make_extractor_with_length(int n1, int n3, HashLayout layout = HashLayout::Toeplitz);

Bits extract(const Extractor& ex, const Bits& t, const Bits& v);
// Uint path for n1, n2 <= 64: bit j of t / v is input / seed bit j.
std::uint64_t extract(const Extractor& ex, std::uint64_t t, std::uint64_t v);
// Row i of the hash matrix for seed v as an n1-bit mask.
std::vector<std::uint64_t> extractor_rows(const Extractor& ex, std::uint64_t v);

Bits random_seed(const Extractor& ex, std::mt19937_64& rng);

struct FlatSourceCheck {
  Rational dtv;              // d_TV([V, E(T,V)], uniform), exact
  long double cond_entropy;  // H(E(T,V) | V) in bits
  long double entropy_floor; // n3 - 2 eps n3 - h_b(eps)
};

// Source uniform on the given distinct n1-bit inputs; enumerates every seed.
FlatSourceCheck flat_source_check(const Extractor& ex, const std::vector<std::uint64_t>& support,
                                  unsigned jobs = 1);

long double binary_entropy(long double p);

}  // namespace wiretap
