#pragma once
#include <string>
#include <utility>
#include <vector>

#include "wiretap/entropy.hpp"

namespace wiretap {

struct LpProblem {
  ConstraintSystem constraints;
  std::vector<Term> objective;  // maximized
};

enum class LpStatus { Optimal, Infeasible, Unbounded, LimitExceeded };
const char* status_name(LpStatus s);

struct LpOptions {
  std::size_t max_pivots = 5'000'000;
  std::string trace_path;  // pivot log, written when non-empty
};

struct LpResult {
  LpStatus status = LpStatus::LimitExceeded;
  Rational value;           // optimal value
  EntropyVector witness;    // optimal point, or a feasible point for Unbounded
  EntropyVector ray;        // improving direction for Unbounded
  // Row multipliers: (row, mu) with sum mu_i a_i = objective (Optimal) or 0 (Infeasible).
  // Le rows carry mu >= 0, Ge rows mu <= 0, Eq rows are free.
  std::vector<std::pair<std::size_t, Rational>> certificate;
  bool certificate_verified = false;
  std::size_t pivots = 0;
};

LpResult solve(const LpProblem& p, const LpOptions& opt = {});

struct Feasibility {
  bool feasible = false;
  bool decided = false;  // false when the pivot limit was hit
  EntropyVector witness;
  std::vector<std::pair<std::size_t, Rational>> certificate;
  bool certificate_verified = false;
  std::size_t pivots = 0;
};

Feasibility feasible(const ConstraintSystem& sys, const LpOptions& opt = {});

}  // namespace wiretap
