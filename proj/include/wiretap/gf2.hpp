#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace wiretap {

// Fixed-length bit string over GF(2); bit i lives in word i / 64.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}
  static Bits from_uint(std::size_t n, std::uint64_t v);
  static Bits parse(const std::string& s);  // "0101", bit 0 first

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return w_[i / 64] >> (i % 64) & 1; }
  void set(std::size_t i, bool v);
  std::uint64_t to_uint() const;  // requires size() <= 64
  std::string str() const;        // bit 0 first
  bool none() const;

  Bits& operator^=(const Bits& o);
  friend Bits operator^(Bits a, const Bits& b) { return a ^= b; }
  bool operator==(const Bits& o) const = default;
  // Parity of the AND with the window o[start, start + size()).
  bool dot_window(const Bits& o, std::size_t start) const;
  const std::vector<std::uint64_t>& words() const { return w_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Rank over GF(2) of rows with at most 64 columns.
int gf2_rank(std::vector<std::uint64_t> rows);

// All vectors in the span of the given rows (2^rank entries), at most 64 columns.
std::vector<std::uint64_t> gf2_span(const std::vector<std::uint64_t>& rows);

}  // namespace wiretap
