#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wiretap/extractor.hpp"
#include "wiretap/rational.hpp"
#include "wiretap/typical.hpp"

namespace wiretap {

struct MinEntropy {
  long double bits = 0;
  std::optional<Rational> exact;  // set when the largest mass is a power of two
};
MinEntropy min_entropy(const Pmf& p);

struct DropTest {
  Rational frequency;  // P_y{ H_inf(X) - H_inf(X|Y=y) <= log|Y| + lambda }
  Rational bound;      // 1 - 2^-lambda
  bool holds = false;
  std::uint64_t samples = 0;  // 0 for the exhaustive mode
};
// joint[x][y]; exhaustive when trials == 0, otherwise y is sampled from p(y).
DropTest min_entropy_drop_test(const std::vector<std::vector<Rational>>& joint, long lambda,
                               std::uint64_t trials = 0, std::uint64_t seed = 0);

// Joint pmf of (X, U) with the given marginals maximizing P(X = U).
std::vector<std::vector<Rational>> maximal_coupling(const Pmf& p, const Pmf& q);
Rational total_variation(const Pmf& p, const Pmf& q);

// One block of a weak code: uniform messages, one legit view per (sink, source)
// and one eavesdropper view per wiretap set. Channel rows are indexed by the joint
// message index (source 0 least significant).
struct WeakSource {
  std::string node;
  std::uint64_t messages = 0;
};
struct LegitView {
  std::string sink;
  std::size_t source = 0;
  std::vector<Pmf> channel;  // rows over the source's messages
};
struct EveView {
  std::string name;
  std::uint64_t outputs = 0;
  std::vector<Pmf> channel;
};
struct WeakCode {
  int blocklength = 1;
  std::vector<WeakSource> sources;
  std::vector<LegitView> legit;
  std::vector<EveView> eavesdroppers;
  Rational declared_leakage;  // bits per use
  Rational declared_error;
  std::uint64_t joint_messages() const;
  Rational eps() const;  // max of the declared metrics
};

// Parses and checks shapes; does not verify declared metrics.
WeakCode parse_weak_code(std::string_view text);

struct WeakVerification {
  struct Leak {
    std::string name;
    EntropyValue bits;  // I(M_S; Y_alpha) per block
    long double per_use = 0;
    std::optional<Rational> per_use_exact;
    bool equals_declared = false;
  };
  struct Error {
    std::string sink;
    std::size_t source = 0;
    Rational probability;
  };
  std::vector<Leak> leakage;
  std::vector<Error> errors;
};
// Throws ValidationError when some measured leakage or error exceeds the declared value.
WeakVerification verify_weak_code(const WeakCode& weak);

enum class LambdaPolicy { Full, Fixed, Auto };
struct LambdaChoice {
  LambdaPolicy policy = LambdaPolicy::Auto;
  long value = 0;
};
// "full", "auto", "fixed:K" or a bare integer.
LambdaChoice parse_lambda(std::string_view text);

enum class SidePolicy { Entropy, Budget };

struct AmplifyOptions {
  int L = 1;
  Rational delta1{1, 10};
  Rational delta2{1, 5};
  Rational eps2{1, 10};
  LambdaChoice lambda;
  SidePolicy side = SidePolicy::Entropy;
  HashLayout hash = HashLayout::IdentityToeplitz;
  std::uint64_t seed = 0;
};

struct SourcePlan {
  std::string node;
  int bits = 0;  // log2 |M_s|
  Rational rate; // bits per use
  int n1 = 0;
  int side_bits = 0;
  Rational side_budget;  // L (n r eps + 1)
  bool side_within = false;
  std::vector<std::uint64_t> syndrome;  // side_bits rows over n1 bits
  Rational eps3;
  Extractor extractor;
  Rational n3_target;  // (1 - eps3 - delta2) n1
  long double implied_eps = 0;  // 2^{-((1 - eps3) n1 - n3)/2}
  std::string sample_seed;  // one draw of V_s for the record, bit 0 first
  std::size_t demands = 0;        // |D_s|
};

struct Inflation {
  std::optional<Rational> extra_uses;  // sum (n2 + side) / ((r - eps)(1 - |D| eps) - 1/n)
  Rational target;                     // L n delta2
  bool within = false;
  std::optional<Rational> formula_uses;  // same with numerator delta1 L n r + L (n r eps + 1)
  std::uint64_t block_uses = 0;              // whole blocks carrying n r (1 - |D| eps) - 1 bits each
  std::string note;
};

struct AmplifiedCode {
  WeakCode weak;
  AmplifyOptions options;
  long lambda = 0;
  std::vector<SourcePlan> sources;
  Inflation inflation;
};

AmplifiedCode amplify(const WeakCode& weak, const AmplifyOptions& opt);

struct AmplifyEvalOptions {
  bool montecarlo = false;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::uint64_t cap = std::uint64_t(1) << 26;
  bool view_includes_side = true;
  bool allow_linear = true;
};

struct AmplifiedLeakage {
  std::string name;
  long double bits = 0;                // I(M_bar; Y, O, V)
  std::optional<Rational> exact;
  long double given_seed = 0;          // I(M_bar; Y, O | V)
  std::optional<Rational> given_seed_exact;
  long double seed_only = 0;           // I(M_bar; V)
  std::optional<long double> ci95;     // montecarlo half width
  std::string method;                  // linear, generic, montecarlo
};

struct SourceEvaluation {
  std::string node;
  std::optional<Rational> dtv;         // d_TV(p_Mbar, uniform)
  long double entropy = 0;
  long double divergence = 0;          // bits
  long double divergence_lower = 0;    // nats, certified
  bool pinsker_holds = false;
  struct E2E {
    std::string sink;
    std::optional<Rational> error;     // P(U_s != M_bar_{s->t})
    bool decoding_exact = false;       // side-information decoding never fails
  };
  std::vector<E2E> end_to_end;
};

struct EventB {
  std::string name;
  Rational typical_probability;  // P(B_alpha)
  Rational gamma;
  long double eta = 0;
  long double union_exponent_bound = 0;   // 2^{-gamma L + eta}
  long double hoeffding = 0;     // sum 2 exp(-2 L eps2^2 p^2)
  bool union_exponent_bound_holds = false;
};

struct AmplifiedEvaluation {
  std::vector<AmplifiedLeakage> leakage;
  std::vector<SourceEvaluation> sources;
  std::vector<EventB> event_b;
  std::string method;
};

AmplifiedEvaluation evaluate_amplified(const AmplifiedCode& code, const AmplifyEvalOptions& opt);

struct PinskerCheck {
  Rational dtv;                    // d_TV(p, uniform), exact
  long double divergence_lower = 0;  // certified lower bound on D(p || uniform) in nats
  bool holds = false;              // 2 d^2 <= divergence_lower
};
// Pinsker's inequality against the uniform law, decided with directed rounding.
PinskerCheck pinsker_check(const Pmf& p);

}  // namespace wiretap
