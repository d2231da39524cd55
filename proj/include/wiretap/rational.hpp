#pragma once
#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wiretap {

using Rational = mpq_class;
using BigInt = mpz_class;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Raised when a run would exceed a configured size cap (exit code 3 in the CLI).
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Parameter choices that leave nothing to build (exit code 2).
struct SizingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accepts "p/q", "-3", "0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);

// k when q == 2^k, for integer k (possibly negative).
std::optional<long> exact_log2(const Rational& q);
// Binary logarithm of a positive rational, in long double.
long double log2_of(const Rational& q);

// -p log2 p as an exact rational when p is a power of two (or zero).
std::optional<Rational> exact_plogp(const Rational& p);

// Shannon entropy in bits; exact when every mass is a power of two.
struct EntropyValue {
  long double approx = 0;
  std::optional<Rational> exact;
};
EntropyValue entropy_of(const std::vector<Rational>& masses);

BigInt pow2(unsigned long k);

// Seed scrambler used to derive per-chunk generator seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
BigInt binomial(unsigned long n, unsigned long k);

}  // namespace wiretap
