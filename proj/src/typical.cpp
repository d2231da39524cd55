#include "wiretap/typical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace wiretap {

void check_pmf(const Pmf& p) {
  if (p.empty()) throw ValidationError("empty pmf");
  Rational s = 0;
  for (const auto& x : p) {
    if (sgn(x) < 0) throw ValidationError("negative probability");
    s += x;
  }
  if (s != 1) throw ValidationError("pmf does not sum to 1");
}

Pmf empirical_distribution(const Sequence& x, int alphabet) {
  if (x.empty()) throw ValidationError("empty sequence");
  Pmf out(alphabet, Rational(0));
  for (int v : x) {
    if (v < 0 || v >= alphabet) throw ValidationError("symbol out of range");
    out[v] += 1;
  }
  for (auto& q : out) q /= static_cast<long>(x.size());
  return out;
}

bool is_typical(const Sequence& x, const Pmf& p, const Rational& eps) {
  std::vector<long> c(p.size(), 0);
  for (int v : x) {
    if (v < 0 || v >= static_cast<int>(p.size())) return false;
    ++c[v];
  }
  const long n = static_cast<long>(x.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    Rational diff = abs(Rational(c[i]) - n * p[i]);
    if (diff > eps * n * p[i]) return false;
  }
  return true;
}

std::vector<std::pair<long, long>> typical_count_ranges(const Pmf& p, long n, const Rational& eps) {
  std::vector<std::pair<long, long>> r;
  for (const auto& q : p) {
    Rational lo = n * q * (1 - eps), hi = n * q * (1 + eps);
    BigInt l, h;
    mpz_cdiv_q(l.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(h.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    long lv = std::max<long>(0, l.get_si()), hv = std::min<long>(n, h.get_si());
    r.push_back({lv, hv});
  }
  return r;
}

void for_each_typical(const Pmf& p, int n, const Rational& eps,
                      const std::function<bool(const Sequence&)>& visit) {
  auto ranges = typical_count_ranges(p, n, eps);
  const int q = static_cast<int>(p.size());
  std::vector<long> count(q, 0);
  Sequence x(n);
  // remaining minimum demand for feasibility pruning
  long min_total = 0;
  for (auto& [lo, hi] : ranges) {
    if (lo > hi) return;
    min_total += lo;
  }
  if (min_total > n) return;
  bool stop = false;
  std::function<void(int, long)> rec = [&](int pos, long need) {
    if (stop) return;
    if (pos == n) {
      if (!visit(x)) stop = true;
      return;
    }
    for (int v = 0; v < q && !stop; ++v) {
      if (count[v] >= ranges[v].second) continue;
      long need2 = need - (count[v] < ranges[v].first ? 1 : 0);
      if (need2 > n - pos - 1) continue;
      ++count[v];
      x[pos] = v;
      rec(pos + 1, need2);
      --count[v];
    }
  };
  rec(0, min_total);
}

std::vector<Sequence> typical_set(const Pmf& p, int n, const Rational& eps, std::uint64_t cap) {
  long double states = std::pow(static_cast<long double>(p.size()), n);
  if (states > static_cast<long double>(cap))
    throw CapExceeded("typical-set enumeration over " + std::to_string(p.size()) + "^" +
                      std::to_string(n) + " sequences exceeds the cap; use membership or streaming");
  std::vector<Sequence> out;
  for_each_typical(p, n, eps, [&](const Sequence& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

namespace {

// Visits every count vector inside the ranges summing to n.
template <class F>
void for_each_type(const std::vector<std::pair<long, long>>& ranges, long n, F&& f) {
  const std::size_t q = ranges.size();
  std::vector<long> c(q, 0);
  std::vector<long> suffix_lo(q + 1, 0), suffix_hi(q + 1, 0);
  for (std::size_t i = q; i-- > 0;) {
    suffix_lo[i] = suffix_lo[i + 1] + ranges[i].first;
    suffix_hi[i] = suffix_hi[i + 1] + ranges[i].second;
  }
  std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
    if (i == q) {
      if (left == 0) f(c);
      return;
    }
    for (long v = ranges[i].first; v <= ranges[i].second; ++v) {
      long rest = left - v;
      if (rest < suffix_lo[i + 1]) break;
      if (rest > suffix_hi[i + 1]) continue;
      c[i] = v;
      rec(i + 1, rest);
    }
  };
  rec(0, n);
}

BigInt multinomial(long n, const std::vector<long>& c) {
  BigInt r = 1;
  long left = n;
  for (long ci : c) {
    r *= binomial(static_cast<unsigned long>(left), static_cast<unsigned long>(ci));
    left -= ci;
  }
  return r;
}

}  // namespace

BigInt typical_set_size(const Pmf& p, long n, const Rational& eps) {
  BigInt total = 0;
  for_each_type(typical_count_ranges(p, n, eps), n, [&](const std::vector<long>& c) {
    total += multinomial(n, c);
  });
  return total;
}

BigInt typical_type_count(const Pmf& p, long n, const Rational& eps) {
  BigInt total = 0;
  for_each_type(typical_count_ranges(p, n, eps), n, [&](const std::vector<long>&) { total += 1; });
  return total;
}

Rational typical_probability(const Pmf& p, long n, const Rational& eps) {
  Rational total = 0;
  for_each_type(typical_count_ranges(p, n, eps), n, [&](const std::vector<long>& c) {
    Rational term(multinomial(n, c));
    for (std::size_t i = 0; i < c.size(); ++i)
      for (long j = 0; j < c[i]; ++j) term *= p[i];
    total += term;
  });
  return total;
}

Pmf pushforward(const Pmf& p, const std::vector<int>& g) {
  if (g.size() != p.size()) throw ValidationError("function table must cover the alphabet");
  int ny = 0;
  for (int y : g) {
    if (y < 0) throw ValidationError("negative output symbol");
    ny = std::max(ny, y + 1);
  }
  Pmf out(ny, Rational(0));
  for (std::size_t x = 0; x < p.size(); ++x) out[g[x]] += p[x];
  return out;
}

PushforwardResult pushforward_typicality_check(const Pmf& p, const std::vector<int>& g, int n,
                                               const Rational& eps, std::uint64_t trials,
                                               std::uint64_t seed) {
  Pmf py = pushforward(p, g);
  PushforwardResult res;
  auto check = [&](const Sequence& x) {
    Sequence y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = g[x[i]];
    ++res.checked;
    if (!is_typical(y, py, eps)) {
      res.passed = false;
      res.counterexample = x;
      return false;
    }
    return true;
  };
  if (trials == 0) {
    for_each_typical(p, n, eps, check);
    return res;
  }
  std::mt19937_64 rng(seed);
  std::vector<double> w;
  for (const auto& q : p) w.push_back(q.get_d());
  std::discrete_distribution<int> dist(w.begin(), w.end());
  Sequence x(n);
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (auto& v : x) v = dist(rng);
    if (is_typical(x, p, eps) && !check(x)) break;
  }
  return res;
}

}  // namespace wiretap
