#include "wiretap/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

namespace wiretap {

int max_ground_size() {
  if (const char* env = std::getenv("WIRETAP_MAX_N")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1 && v <= 30) return static_cast<int>(v);
  }
  return 12;
}

GroundSet::GroundSet(const Network& net) : n_src_(net.sources().size()) {
  for (const auto& s : net.sources()) labels_.push_back("m:" + s.node);
  for (const auto& s : net.sources()) labels_.push_back("k:" + s.node);
  for (const auto& e : net.edges()) labels_.push_back("e:" + e.id);
}

Subset GroundSet::messages() const {
  Subset a = 0;
  for (std::size_t s = 0; s < n_src_; ++s) a |= Subset(1) << message(s);
  return a;
}

Subset GroundSet::keys() const {
  Subset a = 0;
  for (std::size_t s = 0; s < n_src_; ++s) a |= Subset(1) << key(s);
  return a;
}

Subset GroundSet::edges(const std::vector<std::size_t>& ix) const {
  Subset a = 0;
  for (auto e : ix) a |= Subset(1) << edge(e);
  return a;
}

std::string GroundSet::describe(Subset a) const {
  std::string out = "{";
  bool first = true;
  for (int i = 0; i < size(); ++i)
    if (a >> i & 1) {
      if (!first) out += ",";
      out += labels_[i];
      first = false;
    }
  return out + "}";
}

EntropyVector EntropyVector::zero(int n) {
  EntropyVector h;
  h.n = n;
  h.coords.assign(std::size_t(1) << n, Rational(0));
  return h;
}

void ConstraintSystem::append(const ConstraintSystem& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::vector<Term> combine(std::vector<Term> terms) {
  std::map<Subset, Rational> acc;
  for (auto& t : terms)
    if (t.set != 0) acc[t.set] += t.coef;
  std::vector<Term> out;
  for (auto& [s, c] : acc)
    if (sgn(c) != 0) out.push_back({s, c});
  return out;
}

ConstraintSystem elemental_inequalities(int n) {
  if (n < 1) throw ValidationError("ground set must be nonempty");
  if (n > max_ground_size())
    throw CapExceeded("ground set size " + std::to_string(n) + " exceeds cap " +
                      std::to_string(max_ground_size()) + " (set WIRETAP_MAX_N to raise)");
  ConstraintSystem sys;
  sys.n = n;
  const Subset full = (Subset(1) << n) - 1;
  for (int i = 0; i < n; ++i) {
    LinearConstraint c;
    c.terms = combine({{full, 1}, {full & ~(Subset(1) << i), -1}});
    c.rel = Relation::Ge;
    c.rhs = 0;
    c.provenance = "shannon H(" + std::to_string(i) + "|rest)";
    sys.rows.push_back(std::move(c));
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Subset rest = full & ~(Subset(1) << i) & ~(Subset(1) << j);
      // every K ⊆ rest, in increasing mask order
      for (Subset k = 0;; k = (k - rest) & rest) {
        LinearConstraint c;
        c.terms = combine({{k | Subset(1) << i, 1},
                           {k | Subset(1) << j, 1},
                           {k | Subset(1) << i | Subset(1) << j, -1},
                           {k, -1}});
        c.rel = Relation::Ge;
        c.rhs = 0;
        c.provenance = "shannon I(" + std::to_string(i) + ";" + std::to_string(j) + "|" +
                       std::to_string(k) + ")";
        sys.rows.push_back(std::move(c));
        if (k == rest) break;
      }
    }
  return sys;
}

Rational source_cut_capacity(const Network& net) {
  Rational c = 0;
  for (const auto& s : net.sources())
    for (auto e : net.out_edges(s.node)) c += net.edges()[e].cap;
  return c;
}

Relax relax_for_sequence(const Network& net, const Rational& n_l, const Rational& eps_l) {
  if (sgn(n_l) <= 0) throw ValidationError("blocklength must be positive");
  return {Rational(1 / n_l + source_cut_capacity(net) * eps_l), eps_l};
}

namespace {

LinearConstraint row(std::vector<Term> terms, Relation rel, Rational rhs, std::string prov) {
  return {combine(std::move(terms)), rel, std::move(rhs), std::move(prov)};
}

}  // namespace

ConstraintSystem gamma_constraints(const Network& net, const std::vector<int>& families,
                                   const std::optional<Relax>& relax) {
  GroundSet g(net);
  ConstraintSystem sys;
  sys.n = g.size();
  auto want = [&](int f) { return std::find(families.begin(), families.end(), f) != families.end(); };
  for (int f : families)
    if (f < 1 || f > 6) throw ValidationError("unknown constraint family " + std::to_string(f));
  const auto& S = net.sources();
  const Subset ms = g.messages();

  if (want(1)) {
    std::vector<Term> t{{ms | g.keys(), 1}};
    for (std::size_t s = 0; s < S.size(); ++s) {
      t.push_back({Subset(1) << g.message(s), -1});
      t.push_back({Subset(1) << g.key(s), -1});
    }
    sys.rows.push_back(row(t, Relation::Eq, 0, "gamma1 independence"));
    for (std::size_t s = 0; s < S.size(); ++s)
      if (S[s].key_only)
        sys.rows.push_back(row({{Subset(1) << g.message(s), 1}}, Relation::Eq, 0,
                               "gamma1 key-only " + S[s].node));
  }
  if (want(2))
    for (std::size_t s = 0; s < S.size(); ++s) {
      Subset mk = Subset(1) << g.message(s) | Subset(1) << g.key(s);
      Subset out = g.edges(net.out_edges(S[s].node));
      sys.rows.push_back(row({{mk | out, 1}, {mk, -1}}, Relation::Eq, 0, "gamma2 " + S[s].node));
    }
  if (want(3))
    for (const auto& v : net.nodes()) {
      if (net.is_source(v) || net.is_sink(v)) continue;
      const auto& in = net.in_edges(v);
      const auto& out = net.out_edges(v);
      if (out.empty()) continue;
      if (in.empty())
        throw ValidationError("node " + v + " has outgoing edges but no incoming edges");
      Subset a = g.edges(in), b = g.edges(out);
      sys.rows.push_back(row({{a | b, 1}, {a, -1}}, Relation::Eq, 0, "gamma3 " + v));
    }
  if (want(4))
    for (const auto& t : net.sinks()) {
      if (t.beta.empty()) continue;
      Subset mb = 0;
      for (const auto& b : t.beta) mb |= Subset(1) << g.message(net.source_index(b));
      Subset in = g.edges(net.in_edges(t.node));
      std::vector<Term> terms{{mb | in, 1}, {in, -1}};
      if (relax) sys.rows.push_back(row(terms, Relation::Le, relax->eps4, "gamma4 " + t.node));
      else sys.rows.push_back(row(terms, Relation::Eq, 0, "gamma4 " + t.node));
    }
  if (want(5))
    for (std::size_t e = 0; e < net.edges().size(); ++e)
      sys.rows.push_back(row({{Subset(1) << g.edge(e), 1}}, Relation::Le, net.edges()[e].cap,
                             "gamma5 " + net.edges()[e].id));
  if (want(6))
    for (std::size_t a = 0; a < net.wiretap_sets().size(); ++a) {
      Subset al = g.edges(net.wiretap_edges(a));
      std::vector<Term> terms{{ms, 1}, {al, 1}, {ms | al, -1}};
      std::string prov = "gamma6 " + g.describe(al);
      if (relax) sys.rows.push_back(row(terms, Relation::Le, relax->eps6, prov));
      else sys.rows.push_back(row(terms, Relation::Eq, 0, prov));
    }
  return sys;
}

EntropyVector entropy_vector_of_pmf(const JointPmf& pmf) {
  const int n = static_cast<int>(pmf.alphabet.size());
  if (n > max_ground_size())
    throw CapExceeded("pmf has " + std::to_string(n) + " variables, over the ground-set cap");
  Rational total = 0;
  for (const auto& [x, p] : pmf.support) {
    if (sgn(p) < 0) throw ValidationError("negative probability");
    if (static_cast<int>(x.size()) != n) throw ValidationError("outcome arity mismatch");
    total += p;
  }
  if (abs(total - 1) > Rational(1, BigInt(1) << 40)) throw ValidationError("pmf does not sum to 1");
  EntropyVector h = EntropyVector::zero(n);
  for (Subset a = 1; a < (Subset(1) << n); ++a) {
    std::map<std::vector<int>, Rational> marg;
    for (const auto& [x, p] : pmf.support) {
      if (sgn(p) == 0) continue;
      std::vector<int> key;
      for (int i = 0; i < n; ++i)
        if (a >> i & 1) key.push_back(x[i]);
      marg[key] += p;
    }
    std::vector<Rational> masses;
    masses.reserve(marg.size());
    for (auto& [k, p] : marg) masses.push_back(p);
    auto e = entropy_of(masses);
    if (e.exact) {
      h[a] = *e.exact;
    } else {
      h[a] = Rational(static_cast<double>(e.approx));
      h.exact = false;
    }
  }
  return h;
}

Rational evaluate(const LinearConstraint& c, const EntropyVector& h) {
  Rational lhs = 0;
  for (const auto& t : c.terms) lhs += t.coef * h[t.set];
  return lhs;
}

std::vector<ConstraintCheck> MembershipReport::violations() const {
  std::vector<ConstraintCheck> out;
  for (const auto& c : checks)
    if (!c.satisfied) out.push_back(c);
  return out;
}

MembershipReport check_membership(const EntropyVector& h, const ConstraintSystem& sys,
                                  const Rational& tol) {
  if (h.n != sys.n) throw ValidationError("dimension mismatch: vector over " + std::to_string(h.n) +
                                          " labels, system over " + std::to_string(sys.n));
  MembershipReport rep;
  const Rational t = h.exact ? Rational(0) : tol;
  for (std::size_t i = 0; i < sys.rows.size(); ++i) {
    const auto& c = sys.rows[i];
    Rational lhs = evaluate(c, h);
    Rational slack;
    bool ok;
    switch (c.rel) {
      case Relation::Le: slack = c.rhs - lhs; ok = slack >= -t; break;
      case Relation::Ge: slack = lhs - c.rhs; ok = slack >= -t; break;
      default: slack = c.rhs - lhs; ok = abs(slack) <= t; break;
    }
    rep.ok = rep.ok && ok;
    rep.checks.push_back({i, c.provenance, slack, ok});
  }
  return rep;
}

bool dominates(const std::vector<Rational>& r, const std::vector<Rational>& rp) {
  if (r.size() != rp.size()) throw ValidationError("rate vectors differ in length");
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i] > rp[i]) return false;
  return true;
}

EntropyVector scale(const EntropyVector& h, const Rational& a) {
  EntropyVector out = h;
  for (auto& c : out.coords) c *= a;
  return out;
}

std::vector<Rational> project_sources(const EntropyVector& h, const Network& net) {
  GroundSet g(net);
  if (h.n != g.size()) throw ValidationError("dimension mismatch");
  std::vector<Rational> r;
  for (std::size_t s = 0; s < net.sources().size(); ++s) r.push_back(h[Subset(1) << g.message(s)]);
  return r;
}

std::string format_constraint(const LinearConstraint& c) {
  std::string out;
  for (const auto& t : c.terms) {
    if (!out.empty()) out += ' ';
    out += sgn(t.coef) < 0 ? "-" : "+";
    out += to_string(abs(t.coef)) + "·h{" + std::to_string(t.set) + "}";
  }
  if (out.empty()) out = "0";
  out += c.rel == Relation::Eq ? " = " : c.rel == Relation::Le ? " <= " : " >= ";
  out += to_string(c.rhs) + " # " + c.provenance;
  return out;
}

std::string format_constraints(const ConstraintSystem& sys) {
  std::string out;
  for (const auto& c : sys.rows) out += format_constraint(c) + "\n";
  return out;
}

}  // namespace wiretap
