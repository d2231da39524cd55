#include "wiretap/extractor.hpp"

#include <bit>
#include <cmath>
#include <thread>

namespace wiretap {

namespace {

// (2^k / eps^2)^q <= 2^p with delta * n1 = p / q
bool fits(long k, const Rational& eps, const Rational& dn) {
  Rational base = Rational(1) / (eps * eps);
  if (k >= 0) base *= Rational(pow2(static_cast<unsigned long>(k)));
  else base /= Rational(pow2(static_cast<unsigned long>(-k)));
  base.canonicalize();
  BigInt q = dn.get_den(), p = dn.get_num();
  // compare base^q against 2^p; p may be negative
  mpz_class lhs_num, lhs_den;
  mpz_pow_ui(lhs_num.get_mpz_t(), base.get_num_mpz_t(), q.get_ui());
  mpz_pow_ui(lhs_den.get_mpz_t(), base.get_den_mpz_t(), q.get_ui());
  if (p >= 0) return lhs_num <= lhs_den * pow2(p.get_ui());
  return lhs_num * pow2(BigInt(-p).get_ui()) <= lhs_den;
}

}  // namespace

const char* layout_name(HashLayout h) { return h == HashLayout::Toeplitz ? "toeplitz" : "identity_toeplitz"; }

long extractor_output_length(int n1, const Rational& delta, const Rational& eps, int c) {
  if (eps <= 0 || eps > 1) throw SizingError("extractor error eps must lie in (0, 1]");
  if (delta <= 0 || delta > 1) throw SizingError("extractor min-entropy rate must lie in (0, 1]");
  Rational dn = delta * n1;
  long k = static_cast<long>(std::floor(to_double(dn) - 2 * static_cast<double>(log2_of(1 / eps)))) + 2;
  while (!fits(k, eps, dn)) --k;
  while (fits(k + 1, eps, dn)) ++k;
  return k - c;
}

Extractor make_extractor(int n1, const Rational& delta, const Rational& eps, int c) {
  if (n1 < 1) throw SizingError("extractor input length must be positive");
  long n3 = extractor_output_length(n1, delta, eps, c);
  if (n3 < 1)
    throw SizingError("extractor output empty: n3 = floor(delta*n1 - 2*log2(1/eps)) - c = floor(" +
                      to_string(delta) + "*" + std::to_string(n1) + " - 2*log2(" + to_string(1 / eps) +
                      ")) - " + std::to_string(c) + " = " + std::to_string(n3));
  Extractor ex;
  ex.n1 = n1;
  ex.n3 = static_cast<int>(n3);
  ex.n2 = ex.n1 + ex.n3 - 1;
  ex.delta = delta;
  ex.eps = eps;
  ex.c = c;
  return ex;
}

Extractor make_extractor_with_length(int n1, int n3, HashLayout layout) {
  if (n1 < 1 || n3 < 1) throw SizingError("extractor lengths must be positive");
  if (layout == HashLayout::IdentityToeplitz && n3 > n1) throw SizingError("identity layout needs n3 <= n1");
  Extractor ex;
  ex.layout = layout;
  ex.n1 = n1;
  ex.n3 = n3;
  ex.n2 = layout == HashLayout::Toeplitz ? n1 + n3 - 1 : (n3 < n1 ? n1 - 1 : 0);
  return ex;
}

Bits extract(const Extractor& ex, const Bits& t, const Bits& v) {
  if (static_cast<int>(t.size()) != ex.n1 || static_cast<int>(v.size()) != ex.n2)
    throw std::invalid_argument("extractor input or seed has the wrong length");
  Bits out(ex.n3);
  if (ex.layout == HashLayout::Toeplitz) {
    Bits tr(ex.n1);
    for (int k = 0; k < ex.n1; ++k) tr.set(k, t.get(ex.n1 - 1 - k));
    for (int i = 0; i < ex.n3; ++i) out.set(i, tr.dot_window(v, i));
    return out;
  }
  const int w = ex.n1 - ex.n3;
  for (int i = 0; i < ex.n3; ++i) {
    bool b = t.get(i);
    for (int j = 0; j < w; ++j) b ^= v.get(i - j + w - 1) && t.get(ex.n3 + j);
    out.set(i, b);
  }
  return out;
}

std::vector<std::uint64_t> extractor_rows(const Extractor& ex, std::uint64_t v) {
  if (ex.n1 > 64 || ex.n2 > 64) throw std::length_error("uint extractor path needs n1, n2 <= 64");
  std::vector<std::uint64_t> rows(ex.n3, 0);
  if (ex.layout == HashLayout::Toeplitz) {
    for (int i = 0; i < ex.n3; ++i)
      for (int j = 0; j < ex.n1; ++j)
        if (v >> (i + ex.n1 - 1 - j) & 1) rows[i] |= std::uint64_t(1) << j;
    return rows;
  }
  const int w = ex.n1 - ex.n3;
  for (int i = 0; i < ex.n3; ++i) {
    rows[i] = std::uint64_t(1) << i;
    for (int j = 0; j < w; ++j)
      if (v >> (i - j + w - 1) & 1) rows[i] |= std::uint64_t(1) << (ex.n3 + j);
  }
  return rows;
}

std::uint64_t extract(const Extractor& ex, std::uint64_t t, std::uint64_t v) {
  std::uint64_t out = 0;
  auto rows = extractor_rows(ex, v);
  for (int i = 0; i < ex.n3; ++i) out |= std::uint64_t(std::popcount(rows[i] & t) & 1) << i;
  return out;
}

Bits random_seed(const Extractor& ex, std::mt19937_64& rng) {
  Bits v(ex.n2);
  for (int i = 0; i < ex.n2; ++i) v.set(i, rng() & 1);
  return v;
}

long double binary_entropy(long double p) {
  if (p <= 0 || p >= 1) return 0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

FlatSourceCheck flat_source_check(const Extractor& ex, const std::vector<std::uint64_t>& support,
                                  unsigned jobs) {
  if (ex.n2 > 30 || ex.n3 > 20) throw CapExceeded("flat source check limited to n2 <= 30, n3 <= 20");
  if (support.empty()) throw std::invalid_argument("empty flat source");
  const std::uint64_t seeds = std::uint64_t(1) << ex.n2;
  const std::uint64_t outs = std::uint64_t(1) << ex.n3;
  const std::uint64_t S = support.size();
  jobs = std::max(1u, jobs);
  struct Part {
    BigInt abs_sum = 0;  // sum over seeds, outputs of |cnt * 2^n3 - S|
    long double h = 0;
  };
  std::vector<Part> parts(64);
  auto work = [&](unsigned w) {
    std::vector<std::uint64_t> cnt(outs);
    for (unsigned c = w; c < parts.size(); c += jobs) {
      std::uint64_t lo = seeds * c / parts.size(), hi = seeds * (c + 1) / parts.size();
      unsigned long long acc = 0;
      long double h = 0;
      for (std::uint64_t v = lo; v < hi; ++v) {
        std::fill(cnt.begin(), cnt.end(), 0);
        auto rows = extractor_rows(ex, v);
        for (auto t : support) {
          std::uint64_t z = 0;
          for (int i = 0; i < ex.n3; ++i) z |= std::uint64_t(std::popcount(rows[i] & t) & 1) << i;
          ++cnt[z];
        }
        for (auto k : cnt) {
          long long d = static_cast<long long>(k * outs) - static_cast<long long>(S);
          acc += static_cast<unsigned long long>(d < 0 ? -d : d);
          if (k) {
            long double p = static_cast<long double>(k) / S;
            h -= p * std::log2(p);
          }
        }
      }
      parts[c].abs_sum = BigInt(std::to_string(acc));
      parts[c].h = h;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  BigInt total = 0;
  long double h = 0;
  for (auto& p : parts) {
    total += p.abs_sum;
    h += p.h;
  }
  FlatSourceCheck r;
  r.dtv = Rational(total, BigInt(2) * BigInt(std::to_string(seeds)) * BigInt(std::to_string(S)) *
                              BigInt(std::to_string(outs)));
  r.dtv.canonicalize();
  r.cond_entropy = h / seeds;
  long double e = to_double(ex.eps);
  r.entropy_floor = ex.n3 - 2 * e * ex.n3 - binary_entropy(e);
  return r;
}

}  // namespace wiretap
