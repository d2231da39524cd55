#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wiretap/lp.hpp"

namespace wiretap {

enum class BoundMode { ZeroError, Asymptotic };
const char* mode_name(BoundMode m);

struct BoundQuery {
  BoundMode mode = BoundMode::ZeroError;
  std::vector<Rational> weights;   // one per source; empty means all ones
  std::optional<Relax> relax;      // asymptotic only; defaults to (0, 0)
};

// Full program: elemental rows over the ground set plus the mode's gamma families.
ConstraintSystem outer_bound_system(const Network& net, BoundMode mode,
                                    const std::optional<Relax>& relax);

// Functional-dependency closure extracted from rows of the form h_A - h_B = 0 (or <= 0), B ⊂ A.
// closure[S] is the largest set with the same entropy as S under the system.
struct Reduction {
  std::vector<Subset> closure;
  ConstraintSystem reduced;
  std::size_t rules = 0;
};
Reduction reduce_by_closure(const ConstraintSystem& sys);

struct OuterBound {
  LpResult lp;  // witness extended to every coordinate
  BoundMode mode = BoundMode::ZeroError;
  std::vector<Rational> weights;
  std::size_t rows_full = 0, rows_reduced = 0, coords_reduced = 0;
  bool witness_verified = false;  // extended witness satisfies the unreduced system
  std::string relaxation = "shannon";
};

OuterBound outer_bound(const Network& net, const BoundQuery& q, const LpOptions& opt = {});

struct SweepEntry {
  std::vector<Rational> weights;
  OuterBound result;
};
// One solve per distinct weight vector; the reduced system is built once.
std::vector<SweepEntry> outer_bound_sweep(const Network& net,
                                          const std::vector<std::vector<Rational>>& weights,
                                          BoundMode mode, const std::optional<Relax>& relax,
                                          unsigned jobs = 1, const LpOptions& opt = {});

struct CertificateReport {
  bool ok = true;
  BoundMode mode = BoundMode::ZeroError;
  Rational scale;
  std::vector<Rational> rate;
  std::map<int, MembershipReport> families;  // 1..6
};

CertificateReport inner_certificate(const EntropyVector& h, const Network& net, BoundMode mode,
                                    const Rational& a, const Rational& tol = Rational(1, 1000000000));

}  // namespace wiretap
