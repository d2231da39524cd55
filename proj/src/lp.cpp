#include "wiretap/lp.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <unordered_map>

namespace wiretap {

const char* status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    default: return "limit_exceeded";
  }
}

namespace {

// The primal  max c·x  s.t.  a_i·x (<=,>=,=) b_i,  x free,
// is solved through its dual  min b·y  s.t.  sum_j y_j col_j = c,  y >= 0,
// where every primal row contributes one column (two for equalities).
struct DualColumn {
  std::vector<std::pair<int, Rational>> entries;  // (variable, coefficient)
  Rational cost;
  std::size_t row;
  int sign;  // multiplier of the original row is sign * y_j
};

struct Model {
  std::vector<Subset> vars;  // primal variable k <-> coordinate vars[k]
  std::vector<DualColumn> cols;
  std::vector<Rational> c;
};

Model build(const LpProblem& p) {
  Model m;
  std::map<Subset, int> ix;
  for (const auto& r : p.constraints.rows)
    for (const auto& t : r.terms) ix.emplace(t.set, 0);
  for (const auto& t : p.objective) ix.emplace(t.set, 0);
  for (auto& [s, k] : ix) {
    k = static_cast<int>(m.vars.size());
    m.vars.push_back(s);
  }
  m.c.assign(m.vars.size(), Rational(0));
  for (const auto& t : p.objective) m.c[ix[t.set]] += t.coef;
  for (std::size_t i = 0; i < p.constraints.rows.size(); ++i) {
    const auto& r = p.constraints.rows[i];
    DualColumn col;
    col.row = i;
    for (const auto& t : combine(r.terms)) col.entries.push_back({ix[t.set], t.coef});
    col.cost = r.rhs;
    col.sign = 1;
    if (r.rel == Relation::Ge) {
      for (auto& e : col.entries) e.second = -e.second;
      col.cost = -col.cost;
      col.sign = -1;
    }
    if (r.rel == Relation::Eq) {
      DualColumn neg = col;
      for (auto& e : neg.entries) e.second = -e.second;
      neg.cost = -neg.cost;
      neg.sign = -1;
      m.cols.push_back(std::move(col));
      m.cols.push_back(std::move(neg));
    } else {
      m.cols.push_back(std::move(col));
    }
  }
  return m;
}

enum class PhaseEnd { Optimal, Unbounded, Limit };

class Simplex {
 public:
  Simplex(const Model& m, const LpOptions& opt, std::size_t pivots_so_far)
      : m_(m), opt_(opt), n_(static_cast<int>(m.vars.size())), J_(static_cast<int>(m.cols.size())),
        pivots_(pivots_so_far) {
    flip_.assign(n_, 1);
    for (int k = 0; k < n_; ++k)
      if (sgn(m.c[k]) < 0) flip_[k] = -1;
    binv_.assign(n_, std::vector<Rational>(n_, Rational(0)));
    basis_.resize(n_);
    xb_.resize(n_);
    for (int k = 0; k < n_; ++k) {
      binv_[k][k] = 1;
      basis_[k] = J_ + k;
      xb_[k] = flip_[k] * m.c[k];
    }
    basic_.assign(J_ + n_, false);
    for (int k = 0; k < n_; ++k) basic_[J_ + k] = true;
    if (!opt.trace_path.empty()) {
      trace_.open(opt.trace_path, std::ios::app);
      trace_ << "problem vars=" << n_ << " dual_columns=" << J_ << "\n";
    }
  }

  // Phase 1: minimize the sum of artificials.
  PhaseEnd phase1() {
    phase_ = 1;
    return run();
  }

  Rational phase1_objective() const {
    Rational s = 0;
    for (int k = 0; k < n_; ++k)
      if (basis_[k] >= J_) s += xb_[k];
    return s;
  }

  // Pivot zero-valued artificials out where some structural column allows it.
  void drive_out() {
    std::vector<char> nz(n_);
    for (int r = 0; r < n_; ++r) {
      if (basis_[r] < J_) continue;
      for (int q = 0; q < n_; ++q) nz[q] = sgn(binv_[r][q]) != 0;
      for (int j = 0; j < J_; ++j) {
        if (basic_[j]) continue;
        Rational d = 0;
        for (const auto& [v, a] : m_.cols[j].entries)
          if (nz[v]) d += binv_[r][v] * (flip_[v] * a);
        if (sgn(d) != 0) {
          auto u = column(j);
          pivot(r, j, u, Rational(0));
          break;
        }
      }
    }
  }

  PhaseEnd phase2() {
    phase_ = 2;
    return run();
  }

  // Primal point from the simplex multipliers, in model variable order.
  std::vector<Rational> multipliers() const {
    std::vector<Rational> x(n_);
    for (int k = 0; k < n_; ++k) x[k] = flip_[k] * pi_[k];
    return x;
  }

  // Basic solution of the dual, indexed by dual column.
  std::vector<Rational> dual_solution() const {
    std::vector<Rational> y(J_, Rational(0));
    for (int k = 0; k < n_; ++k)
      if (basis_[k] < J_) y[basis_[k]] = xb_[k];
    return y;
  }

  // Dual ray from the last unbounded step.
  std::vector<Rational> dual_ray() const {
    std::vector<Rational> w(J_, Rational(0));
    w[ray_col_] = 1;
    for (int k = 0; k < n_; ++k)
      if (basis_[k] < J_) w[basis_[k]] = -ray_u_[k];
    return w;
  }

  std::size_t pivots() const { return pivots_; }

 private:
  Rational cost(int j) const {
    if (phase_ == 1) return j >= J_ ? Rational(1) : Rational(0);
    return j >= J_ ? Rational(0) : m_.cols[j].cost;
  }

  std::vector<Rational> column(int j) const {
    std::vector<Rational> u(n_, Rational(0));
    for (const auto& [v, a] : m_.cols[j].entries) {
      Rational fa = flip_[v] * a;
      for (int k = 0; k < n_; ++k)
        if (sgn(binv_[k][v]) != 0) u[k] += binv_[k][v] * fa;
    }
    return u;
  }

  void reprice() {
    pi_.assign(n_, Rational(0));
    for (int k = 0; k < n_; ++k) {
      Rational d = cost(basis_[k]);
      if (sgn(d) == 0) continue;
      for (int q = 0; q < n_; ++q)
        if (sgn(binv_[k][q]) != 0) pi_[q] += d * binv_[k][q];
    }
  }

  void pivot(int r, int j, const std::vector<Rational>& u, const Rational& reduced) {
    const Rational piv = u[r];
    std::vector<int> nzr;
    for (int q = 0; q < n_; ++q)
      if (sgn(binv_[r][q]) != 0) {
        binv_[r][q] /= piv;
        nzr.push_back(q);
      }
    xb_[r] /= piv;
    Rational t;
    for (int k = 0; k < n_; ++k) {
      if (k == r || sgn(u[k]) == 0) continue;
      for (int q : nzr) {
        t = u[k] * binv_[r][q];
        binv_[k][q] -= t;
      }
      xb_[k] -= u[k] * xb_[r];
    }
    if (sgn(reduced) != 0)
      for (int q : nzr) pi_[q] += reduced * binv_[r][q];
    if (trace_.is_open())
      trace_ << "pivot " << pivots_ << " phase " << phase_ << " enter " << j << " leave "
             << basis_[r] << " row " << r << " value " << xb_[r].get_str() << "\n";
    basic_[basis_[r]] = false;
    basic_[j] = true;
    basis_[r] = j;
    ++pivots_;
  }

  PhaseEnd run() {
    reprice();
    Rational rc, dot;
    for (;;) {
      int enter = -1;
      for (int j = 0; j < J_; ++j) {
        if (basic_[j]) continue;
        dot = 0;
        for (const auto& [v, a] : m_.cols[j].entries)
          if (sgn(pi_[v]) != 0) dot += pi_[v] * (flip_[v] * a);
        rc = cost(j) - dot;
        if (sgn(rc) < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return PhaseEnd::Optimal;
      if (pivots_ >= opt_.max_pivots) return PhaseEnd::Limit;
      auto u = column(enter);
      int leave = -1;
      Rational best, ratio;
      for (int k = 0; k < n_; ++k) {
        if (sgn(u[k]) <= 0) continue;
        ratio = xb_[k] / u[k];
        if (leave < 0 || ratio < best || (ratio == best && basis_[k] < basis_[leave])) {
          leave = k;
          best = ratio;
        }
      }
      if (leave < 0) {
        ray_col_ = enter;
        ray_u_ = std::move(u);
        return PhaseEnd::Unbounded;
      }
      pivot(leave, enter, u, rc);
    }
  }

  const Model& m_;
  const LpOptions& opt_;
  int n_, J_;
  std::vector<int> flip_;
  std::vector<std::vector<Rational>> binv_;
  std::vector<int> basis_;
  std::vector<Rational> xb_;
  std::vector<bool> basic_;
  std::vector<Rational> pi_;
  int phase_ = 1;
  std::size_t pivots_;
  int ray_col_ = -1;
  std::vector<Rational> ray_u_;
  std::ofstream trace_;
};

EntropyVector expand(int n, const Model& m, const std::vector<Rational>& x) {
  EntropyVector h = EntropyVector::zero(n);
  for (std::size_t k = 0; k < m.vars.size(); ++k) h[m.vars[k]] = x[k];
  return h;
}

std::vector<std::pair<std::size_t, Rational>> row_multipliers(const Model& m,
                                                              const std::vector<Rational>& y) {
  std::map<std::size_t, Rational> mu;
  for (std::size_t j = 0; j < m.cols.size(); ++j)
    if (sgn(y[j]) != 0) mu[m.cols[j].row] += m.cols[j].sign * y[j];
  std::vector<std::pair<std::size_t, Rational>> out;
  for (auto& [i, v] : mu)
    if (sgn(v) != 0) out.push_back({i, v});
  return out;
}

// Checks signs, sum mu_i a_i = target, and returns sum mu_i b_i.
std::optional<Rational> check_multipliers(const ConstraintSystem& sys,
                                          const std::vector<std::pair<std::size_t, Rational>>& mu,
                                          const std::vector<Term>& target) {
  std::map<Subset, Rational> acc;
  Rational val = 0;
  for (const auto& [i, v] : mu) {
    const auto& r = sys.rows[i];
    if (r.rel == Relation::Le && sgn(v) < 0) return std::nullopt;
    if (r.rel == Relation::Ge && sgn(v) > 0) return std::nullopt;
    for (const auto& t : r.terms) acc[t.set] += v * t.coef;
    val += v * r.rhs;
  }
  for (const auto& t : combine(target)) acc[t.set] -= t.coef;
  for (auto& [s, v] : acc)
    if (sgn(v) != 0) return std::nullopt;
  return val;
}

bool satisfies(const ConstraintSystem& sys, const EntropyVector& h) {
  for (const auto& r : sys.rows) {
    Rational lhs = evaluate(r, h);
    if (r.rel == Relation::Le && lhs > r.rhs) return false;
    if (r.rel == Relation::Ge && lhs < r.rhs) return false;
    if (r.rel == Relation::Eq && lhs != r.rhs) return false;
  }
  return true;
}

Rational dot(const std::vector<Term>& obj, const EntropyVector& h) {
  Rational v = 0;
  for (const auto& t : obj) v += t.coef * h[t.set];
  return v;
}

int ground_size(const LpProblem& p) {
  int n = p.constraints.n;
  for (const auto& t : p.objective)
    while (n < 32 && (t.set >> n) != 0) ++n;
  return n;
}

}  // namespace

LpResult solve(const LpProblem& p, const LpOptions& opt) {
  const int n = ground_size(p);
  if (n > 24) throw CapExceeded("coordinate space too large for a dense witness");
  Model m = build(p);
  LpResult res;
  res.witness = EntropyVector::zero(n);
  res.ray = EntropyVector::zero(n);

  Simplex sx(m, opt, 0);
  auto e1 = sx.phase1();
  if (e1 == PhaseEnd::Limit) {
    res.pivots = sx.pivots();
    return res;
  }
  if (sgn(sx.phase1_objective()) == 0) {
    sx.drive_out();
    auto e2 = sx.phase2();
    res.pivots = sx.pivots();
    if (e2 == PhaseEnd::Limit) return res;
    if (e2 == PhaseEnd::Optimal) {
      res.status = LpStatus::Optimal;
      res.witness = expand(n, m, sx.multipliers());
      res.value = dot(p.objective, res.witness);
      res.certificate = row_multipliers(m, sx.dual_solution());
      auto dual_val = check_multipliers(p.constraints, res.certificate, p.objective);
      res.certificate_verified =
          dual_val && *dual_val == res.value && satisfies(p.constraints, res.witness);
      return res;
    }
    res.status = LpStatus::Infeasible;
    res.certificate = row_multipliers(m, sx.dual_ray());
    auto v = check_multipliers(p.constraints, res.certificate, {});
    res.certificate_verified = v && sgn(*v) < 0;
    return res;
  }

  // The dual is infeasible: the primal is unbounded or infeasible.
  EntropyVector ray = expand(n, m, sx.multipliers());
  LpOptions sub = opt;
  sub.max_pivots = opt.max_pivots > sx.pivots() ? opt.max_pivots - sx.pivots() : 0;
  auto f = feasible(p.constraints, sub);
  res.pivots = sx.pivots() + f.pivots;
  if (!f.decided) return res;
  if (!f.feasible) {
    res.status = LpStatus::Infeasible;
    res.certificate = f.certificate;
    res.certificate_verified = f.certificate_verified;
    return res;
  }
  res.status = LpStatus::Unbounded;
  res.witness = f.witness;
  res.ray = ray;
  bool ok = sgn(dot(p.objective, ray)) > 0;
  for (const auto& r : p.constraints.rows) {
    Rational d = 0;
    for (const auto& t : r.terms) d += t.coef * ray[t.set];
    if (r.rel == Relation::Le && sgn(d) > 0) ok = false;
    if (r.rel == Relation::Ge && sgn(d) < 0) ok = false;
    if (r.rel == Relation::Eq && sgn(d) != 0) ok = false;
  }
  res.certificate_verified = ok && f.certificate_verified;
  return res;
}

Feasibility feasible(const ConstraintSystem& sys, const LpOptions& opt) {
  LpProblem p{sys, {}};
  const int n = ground_size(p);
  Model m = build(p);
  Feasibility out;
  out.witness = EntropyVector::zero(n);
  Simplex sx(m, opt, 0);
  sx.phase1();  // c = 0: the artificial basis is already feasible
  sx.drive_out();
  auto e = sx.phase2();
  out.pivots = sx.pivots();
  if (e == PhaseEnd::Limit) return out;
  out.decided = true;
  if (e == PhaseEnd::Optimal) {
    out.feasible = true;
    out.witness = expand(n, m, sx.multipliers());
    out.certificate_verified = satisfies(sys, out.witness);
  } else {
    out.certificate = row_multipliers(m, sx.dual_ray());
    auto v = check_multipliers(sys, out.certificate, {});
    out.certificate_verified = v && sgn(*v) < 0;
  }
  return out;
}

}  // namespace wiretap
