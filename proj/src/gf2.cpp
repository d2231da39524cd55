#include "wiretap/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace wiretap {

Bits Bits::from_uint(std::size_t n, std::uint64_t v) {
  Bits b(n);
  for (std::size_t i = 0; i < n && i < 64; ++i) b.set(i, v >> i & 1);
  return b;
}

Bits Bits::parse(const std::string& s) {
  Bits b(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("bit string must be 0/1");
    b.set(i, s[i] == '1');
  }
  return b;
}

void Bits::set(std::size_t i, bool v) {
  std::uint64_t m = std::uint64_t(1) << (i % 64);
  if (v) w_[i / 64] |= m;
  else w_[i / 64] &= ~m;
}

std::uint64_t Bits::to_uint() const {
  if (n_ > 64) throw std::length_error("bit string longer than 64");
  return w_.empty() ? 0 : w_[0];
}

std::string Bits::str() const {
  std::string s(n_, '0');
  for (std::size_t i = 0; i < n_; ++i)
    if (get(i)) s[i] = '1';
  return s;
}

bool Bits::none() const {
  for (auto w : w_)
    if (w) return false;
  return true;
}

Bits& Bits::operator^=(const Bits& o) {
  if (o.n_ != n_) throw std::length_error("bit strings differ in length");
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
  return *this;
}

bool Bits::dot_window(const Bits& o, std::size_t start) const {
  unsigned parity = 0;
  for (std::size_t k = 0; k < w_.size(); ++k) {
    // gather 64 bits of o starting at start + 64k
    std::size_t pos = start + 64 * k;
    std::size_t wi = pos / 64, off = pos % 64;
    std::uint64_t chunk = wi < o.w_.size() ? o.w_[wi] >> off : 0;
    if (off && wi + 1 < o.w_.size()) chunk |= o.w_[wi + 1] << (64 - off);
    std::uint64_t mine = w_[k];
    if (k == w_.size() - 1 && n_ % 64) mine &= (std::uint64_t(1) << (n_ % 64)) - 1;
    parity ^= std::popcount(mine & chunk) & 1;
  }
  return parity;
}

int gf2_rank(std::vector<std::uint64_t> rows) {
  int rank = 0;
  for (int bit = 63; bit >= 0 && !rows.empty(); --bit) {
    const std::uint64_t m = std::uint64_t(1) << bit;
    std::size_t p = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i] & m) {
        p = i;
        break;
      }
    if (p == rows.size()) continue;
    std::uint64_t piv = rows[p];
    rows[p] = rows.back();
    rows.pop_back();
    for (auto& r : rows)
      if (r & m) r ^= piv;
    ++rank;
  }
  return rank;
}

std::vector<std::uint64_t> gf2_span(const std::vector<std::uint64_t>& rows) {
  std::vector<std::uint64_t> basis;
  for (auto r : rows) {
    for (auto b : basis)
      if ((r ^ b) < r) r ^= b;
    if (r) {
      basis.push_back(r);
      // keep basis sorted descending so the reduction above is a proper echelon pass
      for (std::size_t i = basis.size() - 1; i > 0 && basis[i] > basis[i - 1]; --i) std::swap(basis[i], basis[i - 1]);
    }
  }
  std::vector<std::uint64_t> out{0};
  for (auto b : basis) {
    std::size_t k = out.size();
    for (std::size_t i = 0; i < k; ++i) out.push_back(out[i] ^ b);
  }
  return out;
}

}  // namespace wiretap
