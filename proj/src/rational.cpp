#include "wiretap/rational.hpp"

#include <cmath>

namespace wiretap {

namespace {

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  bool neg = false;
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    neg = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational out;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash), den = body.substr(slash + 1);
    if (!is_digits(num) || !is_digits(den))
      throw ParseError("malformed rational \"" + std::string(text) + "\"");
    BigInt d{std::string(den)};
    if (d == 0) throw ParseError("zero denominator in \"" + std::string(text) + "\"");
    out = Rational(BigInt(std::string(num)), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto ip = body.substr(0, dot), fp = body.substr(dot + 1);
    if ((!ip.empty() && !is_digits(ip)) || !is_digits(fp))
      throw ParseError("malformed rational \"" + std::string(text) + "\"");
    BigInt i{ip.empty() ? std::string("0") : std::string(ip)};
    BigInt f{std::string(fp)};
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    out = Rational(i * scale + f, scale);
  } else {
    if (!is_digits(body))
      throw ParseError("malformed rational \"" + std::string(text) + "\"");
    out = Rational(BigInt(std::string(body)));
  }
  out.canonicalize();
  return neg ? Rational(-out) : out;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

std::optional<long> exact_log2(const Rational& q) {
  if (sgn(q) <= 0) return std::nullopt;
  const BigInt& n = q.get_num();
  const BigInt& d = q.get_den();
  if (d == 1) {
    auto bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    if (mpz_scan1(n.get_mpz_t(), 0) == bits - 1) return static_cast<long>(bits - 1);
    return std::nullopt;
  }
  if (n != 1) return std::nullopt;
  auto bits = mpz_sizeinbase(d.get_mpz_t(), 2);
  if (mpz_scan1(d.get_mpz_t(), 0) == bits - 1) return -static_cast<long>(bits - 1);
  return std::nullopt;
}

long double log2_of(const Rational& q) {
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
  return std::log2l(static_cast<long double>(mn) / md) + static_cast<long double>(en - ed);
}

std::optional<Rational> exact_plogp(const Rational& p) {
  if (sgn(p) == 0) return Rational(0);
  auto k = exact_log2(p);
  if (!k) return std::nullopt;
  return Rational(-p * Rational(*k));
}

EntropyValue entropy_of(const std::vector<Rational>& masses) {
  EntropyValue out;
  Rational exact = 0;
  bool ok = true;
  for (const auto& p : masses) {
    if (sgn(p) == 0) continue;
    if (ok) {
      if (auto t = exact_plogp(p)) exact += *t;
      else ok = false;
    }
    out.approx -= static_cast<long double>(p.get_d()) * log2_of(p);
  }
  if (ok) {
    out.exact = exact;
    out.approx = static_cast<long double>(exact.get_d());
  }
  return out;
}

BigInt pow2(unsigned long k) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, k);
  return r;
}

BigInt binomial(unsigned long n, unsigned long k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

}  // namespace wiretap
