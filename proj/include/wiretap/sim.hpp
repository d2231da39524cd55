#pragma once
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wiretap/bounds.hpp"
#include "wiretap/code.hpp"
#include "wiretap/typical.hpp"

namespace wiretap {

// Single-letter random variables driving the random-code constructions.
struct RvSystem {
  Network net;
  CodeSpec code;            // alphabets and symbolwise maps; decoders optional
  std::vector<Pmf> pm, pk;  // per source
  Rational scale = 1;       // a_k
  Rational slack = 0;       // eps_k
};

RvSystem parse_rv_system(std::string_view text);

// Joint pmf of all ground variables for one symbol.
JointPmf rv_joint(const RvSystem& rv);

struct EdgeSizing {
  Pmf pmf;                  // single-letter pmf of U_e
  BigInt typical_size;      // |T(U_e)| at length n_t
  Rational p_atypical;      // iid probability that U_e^{n_t} is atypical
  bool p_atypical_bounded = false;  // Chernoff bound used instead of the exact value
};

struct SimCode {
  explicit SimCode(RvSystem r) : rv(std::move(r)) {}
  RvSystem rv;
  BoundMode mode = BoundMode::ZeroError;
  int nt = 0;
  Rational eps;
  std::vector<std::vector<Sequence>> messages, keys;  // codebooks, lexicographic
  long double delta = 0;
  long n = 0;
  std::vector<EdgeSizing> edges;
  std::vector<long double> rate;        // log2 |M_s| / n
  std::vector<long double> rate_bound;  // lower bound from the construction
  std::vector<CodeSpec::Decoder> decoders;
  bool decoders_unique = true;          // derived decoders are functions (zero mode)
};

SimCode build_sim(const RvSystem& rv, BoundMode mode, int nt, const Rational& eps);

struct SimOptions {
  std::uint64_t trials = 0;  // 0: exhaustive
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::uint64_t state_cap = std::uint64_t(1) << 24;
};

struct SimMetrics {
  BoundMode mode = BoundMode::ZeroError;
  bool exhaustive = true;
  std::uint64_t samples = 0;
  struct Error {
    std::string sink, source;
    std::uint64_t count = 0;
    Rational probability;  // exact when exhaustive, empirical frequency otherwise
  };
  std::vector<Error> errors;
  struct EdgeCheck {
    std::string id;
    EntropyValue entropy;           // H(W_e)
    Rational capacity_bits;         // n c_e
    long double entropy_bound = 0;  // 1 + log|T| + n_t log|U_e| P(I_e = 0), zero mode
    Rational p_atypical_measured;
    bool within_capacity = false;
    bool fixed_length_ok = false;   // log(|T|+1) <= n c_e, asymptotic mode
  };
  std::vector<EdgeCheck> edges;
  struct Leak {
    std::vector<std::string> alpha;
    EntropyValue bits;              // I(M_S; W_alpha)
    bool factorizes = false;
    EntropyValue raw_bits;          // I(M_S; U_alpha^{n_t}) before erasures
    long double per_symbol = 0;     // bits / n
    long double rhs = 0;            // |S| log(1-eps)/n + 2 eps (n_t/n) sum h_k
    long double rhs_reversed = 0;   // same with -|S| log(1-eps)/n
    long double erasure_bound = 0;  // raw + |alpha| bits
    long double erasure_bound_log = 0;  // raw + log|alpha| bits
  };
  std::vector<Leak> leakage;
};

SimMetrics run_sim(const SimCode& sim, const SimOptions& opt = {});

}  // namespace wiretap
