#pragma once
// Independent reference computations used to derive expected values in the tests.
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <tuple>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wiretap/entropy.hpp"
#include "wiretap/lp.hpp"

namespace oracle {

using wiretap::Rational;

inline std::string fixture(const std::string& name) {
  std::ifstream in(std::string(WIRETAP_FIXTURES) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) { return std::string(WIRETAP_FIXTURES) + "/" + name; }

// H(X_A) for every mask by direct marginalization, in double.
inline std::vector<double> entropies(const wiretap::JointPmf& pmf) {
  const int n = static_cast<int>(pmf.alphabet.size());
  std::vector<double> h(std::size_t(1) << n, 0.0);
  for (std::uint32_t a = 1; a < h.size(); ++a) {
    std::map<std::vector<int>, double> marg;
    for (const auto& [x, p] : pmf.support) {
      std::vector<int> key;
      for (int i = 0; i < n; ++i)
        if (a >> i & 1) key.push_back(x[i]);
      marg[key] += p.get_d();
    }
    for (const auto& [k, p] : marg)
      if (p > 0) h[a] -= p * std::log2(p);
  }
  return h;
}

// Random pmf with masses k / 2^bits over n variables with the given alphabets.
inline wiretap::JointPmf dyadic_pmf(std::mt19937_64& rng, int n, int max_alphabet, int bits) {
  wiretap::JointPmf pmf;
  std::uniform_int_distribution<int> al(1, max_alphabet);
  std::size_t cells = 1;
  for (int i = 0; i < n; ++i) {
    pmf.alphabet.push_back(al(rng));
    cells *= pmf.alphabet.back();
  }
  const long total = 1L << bits;
  std::vector<long> mass(cells, 0);
  std::uniform_int_distribution<std::size_t> pick(0, cells - 1);
  for (long u = 0; u < total; ++u) ++mass[pick(rng)];
  for (std::size_t c = 0; c < cells; ++c) {
    if (!mass[c]) continue;
    std::vector<int> x(n);
    std::size_t r = c;
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<int>(r % pmf.alphabet[i]);
      r /= pmf.alphabet[i];
    }
    Rational q(mass[c], total);
    q.canonicalize();
    pmf.support.push_back({x, q});
  }
  return pmf;
}

// Solves the square system M y = b exactly; nullopt when singular.
inline std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> M, std::vector<Rational> b) {
  const std::size_t d = M.size();
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    while (p < d && sgn(M[p][c]) == 0) ++p;
    if (p == d) return std::nullopt;
    std::swap(M[p], M[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c || sgn(M[r][c]) == 0) continue;
      Rational f = M[r][c] / M[c][c];
      for (std::size_t k = c; k < d; ++k) M[r][k] -= f * M[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<Rational> y(d);
  for (std::size_t i = 0; i < d; ++i) y[i] = b[i] / M[i][i];
  return y;
}

// max c.x subject to rows and x >= 0, by enumerating vertices and extreme rays.
struct DenseLp {
  int d = 0;
  std::vector<std::vector<Rational>> a;
  std::vector<wiretap::Relation> rel;
  std::vector<Rational> b;
  std::vector<Rational> c;
};

struct BruteResult {
  wiretap::LpStatus status;
  Rational value;
};

inline bool satisfies(const DenseLp& lp, const std::vector<Rational>& x, bool homogeneous) {
  for (int i = 0; i < lp.d; ++i)
    if (sgn(x[i]) < 0) return false;
  for (std::size_t r = 0; r < lp.a.size(); ++r) {
    Rational s = 0;
    for (int i = 0; i < lp.d; ++i) s += lp.a[r][i] * x[i];
    Rational rhs = homogeneous ? Rational(0) : lp.b[r];
    if (lp.rel[r] == wiretap::Relation::Le && s > rhs) return false;
    if (lp.rel[r] == wiretap::Relation::Ge && s < rhs) return false;
    if (lp.rel[r] == wiretap::Relation::Eq && s != rhs) return false;
  }
  return true;
}

inline BruteResult brute_force(const DenseLp& lp) {
  // rows of the tight systems: constraint rows, then x_i = 0
  std::vector<std::vector<Rational>> rows = lp.a;
  std::vector<Rational> rhs = lp.b;
  for (int i = 0; i < lp.d; ++i) {
    std::vector<Rational> e(lp.d, Rational(0));
    e[i] = 1;
    rows.push_back(e);
    rhs.push_back(0);
  }
  const std::size_t R = rows.size();
  auto dot = [&](const std::vector<Rational>& x) {
    Rational s = 0;
    for (int i = 0; i < lp.d; ++i) s += lp.c[i] * x[i];
    return s;
  };
  std::optional<Rational> best;
  std::vector<int> pick(lp.d);
  // vertices: choose d rows
  std::function<void(int, std::size_t)> rec = [&](int k, std::size_t start) {
    if (k == lp.d) {
      std::vector<std::vector<Rational>> M;
      std::vector<Rational> bb;
      for (int i : pick) M.push_back(rows[i]), bb.push_back(rhs[i]);
      auto x = solve_square(M, bb);
      if (x && satisfies(lp, *x, false)) {
        Rational v = dot(*x);
        if (!best || v > *best) best = v;
      }
      return;
    }
    for (std::size_t r = start; r < R; ++r) {
      pick[k] = static_cast<int>(r);
      rec(k + 1, r + 1);
    }
  };
  rec(0, 0);
  if (!best) return {wiretap::LpStatus::Infeasible, 0};
  // extreme rays: d-1 tight homogeneous rows plus sum r = 1
  bool unbounded = false;
  std::vector<int> pr(lp.d - 1);
  std::function<void(int, std::size_t)> rays = [&](int k, std::size_t start) {
    if (unbounded) return;
    if (k == lp.d - 1) {
      std::vector<std::vector<Rational>> M;
      std::vector<Rational> bb;
      for (int i : pr) M.push_back(rows[i]), bb.push_back(0);
      M.push_back(std::vector<Rational>(lp.d, Rational(1)));
      bb.push_back(1);
      auto r = solve_square(M, bb);
      if (r && satisfies(lp, *r, true) && dot(*r) > 0) unbounded = true;
      return;
    }
    for (std::size_t r = start; r < R; ++r) {
      pr[k] = static_cast<int>(r);
      rays(k + 1, r + 1);
    }
  };
  rays(0, 0);
  if (unbounded) return {wiretap::LpStatus::Unbounded, 0};
  return {wiretap::LpStatus::Optimal, *best};
}

// Same program in the solver's entropy-coordinate form; variable i is mask i + 1.
inline wiretap::LpProblem to_problem(const DenseLp& lp) {
  wiretap::LpProblem p;
  p.constraints.n = 3;
  for (std::size_t r = 0; r < lp.a.size(); ++r) {
    wiretap::LinearConstraint c;
    for (int i = 0; i < lp.d; ++i)
      if (sgn(lp.a[r][i]) != 0) c.terms.push_back({static_cast<wiretap::Subset>(i + 1), lp.a[r][i]});
    c.rel = lp.rel[r];
    c.rhs = lp.b[r];
    c.provenance = "row " + std::to_string(r);
    p.constraints.rows.push_back(c);
  }
  for (int i = 0; i < lp.d; ++i) {
    wiretap::LinearConstraint c;
    c.terms.push_back({static_cast<wiretap::Subset>(i + 1), Rational(1)});
    c.rel = wiretap::Relation::Ge;
    c.rhs = 0;
    c.provenance = "nonneg";
    p.constraints.rows.push_back(c);
  }
  for (int i = 0; i < lp.d; ++i)
    if (sgn(lp.c[i]) != 0) p.objective.push_back({static_cast<wiretap::Subset>(i + 1), lp.c[i]});
  return p;
}

inline DenseLp random_lp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-5, 5), dd(1, 6), mm(1, 10), rr(0, 9);
  DenseLp lp;
  lp.d = dd(rng);
  int m = mm(rng);
  for (int r = 0; r < m; ++r) {
    std::vector<Rational> row(lp.d);
    for (auto& x : row) x = coef(rng);
    lp.a.push_back(row);
    int k = rr(rng);
    lp.rel.push_back(k < 6 ? wiretap::Relation::Le : (k < 9 ? wiretap::Relation::Ge : wiretap::Relation::Eq));
    lp.b.push_back(coef(rng));
  }
  lp.c.resize(lp.d);
  for (auto& x : lp.c) x = coef(rng);
  return lp;
}

// Independent check of a row-multiplier certificate: sum mu_i a_i == target and signs.
inline bool certificate_holds(const wiretap::ConstraintSystem& sys,
                              const std::vector<std::pair<std::size_t, Rational>>& mu,
                              const std::vector<wiretap::Term>& target, const Rational& bound,
                              bool farkas) {
  std::map<wiretap::Subset, Rational> sum;
  Rational rhs = 0;
  for (const auto& [r, m] : mu) {
    const auto& row = sys.rows[r];
    if (row.rel == wiretap::Relation::Le && sgn(m) < 0) return false;
    if (row.rel == wiretap::Relation::Ge && sgn(m) > 0) return false;
    for (const auto& t : row.terms) sum[t.set] += m * t.coef;
    rhs += m * row.rhs;
  }
  for (const auto& t : target) sum[t.set] -= t.coef;
  for (const auto& [k, v] : sum)
    if (sgn(v) != 0) return false;
  return farkas ? rhs < 0 : rhs == bound;
}

// Max-flow by augmenting paths over exact capacities.
inline Rational max_flow(const std::vector<std::string>& nodes,
                         const std::vector<std::tuple<std::string, std::string, Rational>>& edges,
                         const std::string& s, const std::string& t) {
  std::map<std::string, int> ix;
  for (std::size_t i = 0; i < nodes.size(); ++i) ix[nodes[i]] = static_cast<int>(i);
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<Rational>> cap(n, std::vector<Rational>(n, Rational(0)));
  for (const auto& [u, v, c] : edges) cap[ix[u]][ix[v]] += c;
  Rational flow = 0;
  while (true) {
    std::vector<int> prev(n, -1);
    prev[ix[s]] = ix[s];
    std::vector<int> q{ix[s]};
    for (std::size_t h = 0; h < q.size(); ++h)
      for (int v = 0; v < n; ++v)
        if (prev[v] < 0 && sgn(cap[q[h]][v]) > 0) prev[v] = q[h], q.push_back(v);
    if (prev[ix[t]] < 0) return flow;
    Rational aug = -1;
    for (int v = ix[t]; v != ix[s]; v = prev[v])
      if (aug < 0 || cap[prev[v]][v] < aug) aug = cap[prev[v]][v];
    for (int v = ix[t]; v != ix[s]; v = prev[v]) cap[prev[v]][v] -= aug, cap[v][prev[v]] += aug;
    flow += aug;
  }
}

// All sequences of length n over the alphabet, filtered by relative typicality.
inline std::vector<std::vector<int>> typical_by_filter(const std::vector<Rational>& p, int n, const Rational& eps) {
  std::vector<std::vector<int>> out;
  const int k = static_cast<int>(p.size());
  std::vector<int> x(n, 0);
  while (true) {
    std::vector<long> cnt(k, 0);
    for (int v : x) ++cnt[v];
    bool ok = true;
    for (int a = 0; a < k && ok; ++a) {
      Rational dev = Rational(cnt[a], n) - p[a];
      if (dev < 0) dev = -dev;
      ok = dev <= eps * p[a];
    }
    if (ok) out.push_back(x);
    int i = n - 1;
    while (i >= 0 && x[i] == k - 1) x[i--] = 0;
    if (i < 0) break;
    ++x[i];
  }
  return out;
}

}  // namespace oracle
