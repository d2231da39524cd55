#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wiretap/network.hpp"
#include "wiretap/rational.hpp"

namespace wiretap {

// Bitmask over ground labels; bit i set means label i is in the subset.
using Subset = std::uint32_t;

// Ground-set cap from WIRETAP_MAX_N, default 12.
int max_ground_size();

// Labels: m_s for each source in order, then k_s, then every edge in list order.
class GroundSet {
 public:
  explicit GroundSet(const Network& net);
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  int message(std::size_t s) const { return static_cast<int>(s); }
  int key(std::size_t s) const { return static_cast<int>(n_src_ + s); }
  int edge(std::size_t e) const { return static_cast<int>(2 * n_src_ + e); }
  Subset messages() const;  // M_S
  Subset keys() const;      // K_S
  Subset edges(const std::vector<std::size_t>& ix) const;
  std::string describe(Subset a) const;

 private:
  std::size_t n_src_;
  std::vector<std::string> labels_;
};

struct EntropyVector {
  int n = 0;
  std::vector<Rational> coords;  // indexed by mask, coords[0] == 0
  bool exact = true;             // false: coords hold rounded double values

  static EntropyVector zero(int n);
  const Rational& operator[](Subset a) const { return coords[a]; }
  Rational& operator[](Subset a) { return coords[a]; }
};

enum class Relation { Eq, Le, Ge };

struct Term {
  Subset set;
  Rational coef;
};

struct LinearConstraint {
  std::vector<Term> terms;  // sorted by set, no zero coefficients, no empty set
  Relation rel = Relation::Le;
  Rational rhs;
  std::string provenance;
};

struct ConstraintSystem {
  int n = 0;
  std::vector<LinearConstraint> rows;
  void append(const ConstraintSystem& other);
};

// Sum of coef·h over terms, merging duplicates and dropping the empty set.
std::vector<Term> combine(std::vector<Term> terms);

ConstraintSystem elemental_inequalities(int n);

struct Relax {
  Rational eps4 = 0;
  Rational eps6 = 0;
};

// Sum over sources of the capacities leaving each source.
Rational source_cut_capacity(const Network& net);
// Relaxation at finite index: eps4 = 1/n_l + c_M eps_l, eps6 = eps_l.
Relax relax_for_sequence(const Network& net, const Rational& n_l, const Rational& eps_l);

// families: any of 1..6. With relax set, families 4 and 6 become ≤ rows.
ConstraintSystem gamma_constraints(const Network& net, const std::vector<int>& families,
                                   const std::optional<Relax>& relax = std::nullopt);

struct JointPmf {
  std::vector<int> alphabet;  // one size per variable
  std::vector<std::pair<std::vector<int>, Rational>> support;
};

EntropyVector entropy_vector_of_pmf(const JointPmf& pmf);

struct ConstraintCheck {
  std::size_t row;
  std::string provenance;
  Rational slack;  // >= 0 means satisfied (for equalities the signed residual)
  bool satisfied;
};

struct MembershipReport {
  bool ok = true;
  std::vector<ConstraintCheck> checks;
  std::vector<ConstraintCheck> violations() const;
};

Rational evaluate(const LinearConstraint& c, const EntropyVector& h);
MembershipReport check_membership(const EntropyVector& h, const ConstraintSystem& sys,
                                  const Rational& tol);

bool dominates(const std::vector<Rational>& r, const std::vector<Rational>& rp);
EntropyVector scale(const EntropyVector& h, const Rational& a);
std::vector<Rational> project_sources(const EntropyVector& h, const Network& net);

std::string format_constraint(const LinearConstraint& c);
std::string format_constraints(const ConstraintSystem& sys);

}  // namespace wiretap
