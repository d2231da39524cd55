#include "wiretap/bounds.hpp"

#include <algorithm>
#include <set>
#include <thread>

namespace wiretap {

const char* mode_name(BoundMode m) { return m == BoundMode::ZeroError ? "zero" : "asymptotic"; }

ConstraintSystem outer_bound_system(const Network& net, BoundMode mode,
                                    const std::optional<Relax>& relax) {
  auto rep = validate(net);
  if (!rep.ok) throw ValidationError("invalid network: " + rep.violations.front().detail);
  GroundSet g(net);
  if (g.size() > max_ground_size())
    throw CapExceeded("ground set size N = " + std::to_string(g.size()) + " exceeds cap " +
                      std::to_string(max_ground_size()) + " (set WIRETAP_MAX_N to raise)");
  ConstraintSystem sys = elemental_inequalities(g.size());
  std::optional<Relax> r;
  if (mode == BoundMode::Asymptotic) r = relax.value_or(Relax{});
  sys.append(gamma_constraints(net, {1, 2, 3, 4, 5, 6}, r));
  return sys;
}

Reduction reduce_by_closure(const ConstraintSystem& sys) {
  struct Rule {
    Subset from, to;
  };
  std::vector<Rule> rules;
  for (const auto& r : sys.rows) {
    if (sgn(r.rhs) != 0 || r.rel == Relation::Ge) continue;
    if (r.terms.size() == 1 && r.terms[0].coef == 1) {
      rules.push_back({0, r.terms[0].set});
    } else if (r.terms.size() == 2) {
      const Term *pos = nullptr, *neg = nullptr;
      for (const auto& t : r.terms) {
        if (t.coef == 1) pos = &t;
        if (t.coef == -1) neg = &t;
      }
      if (pos && neg && (neg->set & ~pos->set) == 0) rules.push_back({neg->set, pos->set});
    }
  }
  Reduction out;
  out.rules = rules.size();
  const Subset size = Subset(1) << sys.n;
  out.closure.resize(size);
  for (Subset s = 0; s < size; ++s) {
    Subset c = s;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& ru : rules)
        if ((ru.from & ~c) == 0 && (ru.to & ~c) != 0) {
          c |= ru.to;
          changed = true;
        }
    }
    out.closure[s] = c;
  }
  const Subset zero = out.closure[0];
  out.reduced.n = sys.n;
  std::set<std::string> seen;
  for (const auto& r : sys.rows) {
    std::vector<Term> terms;
    for (const auto& t : r.terms) {
      Subset c = out.closure[t.set];
      if (c != zero) terms.push_back({c, t.coef});
    }
    LinearConstraint nr{combine(std::move(terms)), r.rel, r.rhs, r.provenance};
    if (nr.rel == Relation::Ge) {
      for (auto& t : nr.terms) t.coef = -t.coef;
      nr.rhs = -nr.rhs;
      nr.rel = Relation::Le;
    }
    if (nr.terms.empty()) {
      bool holds = nr.rel == Relation::Le ? sgn(nr.rhs) >= 0 : sgn(nr.rhs) == 0;
      if (holds) continue;
    }
    std::string key = nr.rel == Relation::Eq ? "=" : "<";
    key += nr.rhs.get_str();
    for (const auto& t : nr.terms) key += " " + t.coef.get_str() + "@" + std::to_string(t.set);
    if (!seen.insert(key).second) continue;
    out.reduced.rows.push_back(std::move(nr));
  }
  return out;
}

namespace {

std::vector<Rational> resolve_weights(const Network& net, const std::vector<Rational>& w) {
  if (w.empty()) return std::vector<Rational>(net.sources().size(), Rational(1));
  if (w.size() != net.sources().size())
    throw ValidationError("expected " + std::to_string(net.sources().size()) + " weights, got " +
                          std::to_string(w.size()));
  for (const auto& x : w)
    if (sgn(x) < 0) throw ValidationError("weights must be nonnegative");
  return w;
}

struct Prepared {
  ConstraintSystem full;
  Reduction red;
};

Prepared prepare(const Network& net, BoundMode mode, const std::optional<Relax>& relax) {
  Prepared p;
  p.full = outer_bound_system(net, mode, relax);
  p.red = reduce_by_closure(p.full);
  return p;
}

OuterBound solve_prepared(const Network& net, const Prepared& p, BoundMode mode,
                          const std::vector<Rational>& w, const LpOptions& opt) {
  GroundSet g(net);
  OuterBound out;
  out.mode = mode;
  out.weights = w;
  out.rows_full = p.full.rows.size();
  out.rows_reduced = p.red.reduced.rows.size();
  std::set<Subset> coords;
  for (const auto& r : p.red.reduced.rows)
    for (const auto& t : r.terms) coords.insert(t.set);
  out.coords_reduced = coords.size();

  std::vector<Term> obj;
  const Subset zero = p.red.closure[0];
  for (std::size_t s = 0; s < w.size(); ++s) {
    Subset c = p.red.closure[Subset(1) << g.message(s)];
    if (c != zero && sgn(w[s]) != 0) obj.push_back({c, w[s]});
  }
  LpProblem lp{p.red.reduced, combine(obj)};
  out.lp = solve(lp, opt);

  auto extend = [&](const EntropyVector& red) {
    EntropyVector h = EntropyVector::zero(p.full.n);
    for (Subset s = 1; s < h.coords.size(); ++s) {
      Subset c = p.red.closure[s];
      h[s] = c == zero ? Rational(0) : red[c];
    }
    return h;
  };
  if (out.lp.status == LpStatus::Optimal || out.lp.status == LpStatus::Unbounded) {
    out.lp.witness = extend(out.lp.witness);
    out.witness_verified = check_membership(out.lp.witness, p.full, 0).ok;
    if (out.lp.status == LpStatus::Unbounded) out.lp.ray = extend(out.lp.ray);
  }
  return out;
}

}  // namespace

OuterBound outer_bound(const Network& net, const BoundQuery& q, const LpOptions& opt) {
  auto w = resolve_weights(net, q.weights);
  auto p = prepare(net, q.mode, q.relax);
  return solve_prepared(net, p, q.mode, w, opt);
}

std::vector<SweepEntry> outer_bound_sweep(const Network& net,
                                          const std::vector<std::vector<Rational>>& weights,
                                          BoundMode mode, const std::optional<Relax>& relax,
                                          unsigned jobs, const LpOptions& opt) {
  std::vector<SweepEntry> out;
  if (weights.empty()) return out;
  std::vector<std::vector<Rational>> resolved;
  for (const auto& w : weights) resolved.push_back(resolve_weights(net, w));
  auto p = prepare(net, mode, relax);

  std::vector<std::size_t> first(resolved.size());
  std::vector<std::size_t> distinct;
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    first[i] = i;
    for (std::size_t j = 0; j < i; ++j)
      if (resolved[j] == resolved[i]) {
        first[i] = first[j];
        break;
      }
    if (first[i] == i) distinct.push_back(i);
  }
  std::vector<OuterBound> results(resolved.size());
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(distinct.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t k = t; k < distinct.size(); k += jobs)
        results[distinct[k]] = solve_prepared(net, p, mode, resolved[distinct[k]], opt);
    });
  for (auto& th : pool) th.join();
  for (std::size_t i = 0; i < resolved.size(); ++i)
    out.push_back({resolved[i], results[first[i]]});
  return out;
}

CertificateReport inner_certificate(const EntropyVector& h, const Network& net, BoundMode mode,
                                    const Rational& a, const Rational& tol) {
  if (sgn(a) <= 0 || a > 1) throw ValidationError("scale must lie in (0, 1]");
  GroundSet g(net);
  if (h.n != g.size()) throw ValidationError("dimension mismatch");
  CertificateReport rep;
  rep.mode = mode;
  rep.scale = a;
  for (int f : {1, 2, 3, 4, 6}) {
    auto sys = gamma_constraints(net, {f});
    rep.families[f] = check_membership(h, sys, tol);
  }
  rep.families[5] = check_membership(scale(h, a), gamma_constraints(net, {5}), tol);
  for (auto& [f, m] : rep.families) rep.ok = rep.ok && m.ok;
  for (const auto& r : project_sources(h, net)) rep.rate.push_back(a * r);
  return rep;
}

}  // namespace wiretap
