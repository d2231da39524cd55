#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wiretap/rational.hpp"

namespace wiretap {

using Pmf = std::vector<Rational>;
using Sequence = std::vector<int>;

void check_pmf(const Pmf& p);

Pmf empirical_distribution(const Sequence& x, int alphabet);

// |count(x)/n - p(x)| <= eps p(x) for every symbol; zero-mass symbols must not occur.
bool is_typical(const Sequence& x, const Pmf& p, const Rational& eps);

// Admissible count range [lo, hi] of each symbol in a typical sequence of length n.
std::vector<std::pair<long, long>> typical_count_ranges(const Pmf& p, long n, const Rational& eps);

// Streams typical sequences in lexicographic order; stop by returning false.
void for_each_typical(const Pmf& p, int n, const Rational& eps,
                      const std::function<bool(const Sequence&)>& visit);

// Materialized set; refuses when |X|^n exceeds cap.
std::vector<Sequence> typical_set(const Pmf& p, int n, const Rational& eps,
                                  std::uint64_t cap = std::uint64_t(1) << 22);

// Exact size and iid probability of the typical set, by summing over types.
BigInt typical_set_size(const Pmf& p, long n, const Rational& eps);
Rational typical_probability(const Pmf& p, long n, const Rational& eps);
// Number of typical types (cost of the two functions above).
BigInt typical_type_count(const Pmf& p, long n, const Rational& eps);

struct PushforwardResult {
  bool passed = true;
  std::uint64_t checked = 0;
  std::optional<Sequence> counterexample;
};

// For typical x^n, checks that g(x^n) is typical for the pushforward pmf.
// trials == 0 enumerates every typical sequence; otherwise samples x^n iid from p (seeded)
// and checks the typical ones.
PushforwardResult pushforward_typicality_check(const Pmf& p, const std::vector<int>& g, int n,
                                               const Rational& eps, std::uint64_t trials = 0,
                                               std::uint64_t seed = 0);

Pmf pushforward(const Pmf& p, const std::vector<int>& g);

}  // namespace wiretap
