#include "wiretap/amplifier.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <gmp.h>
#include <json.hpp>
#include <mpfr.h>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "wiretap/gf2.hpp"

namespace wiretap {

using nlohmann::json;

namespace {

std::uint64_t mask(int bits) { return bits >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << bits) - 1; }

int log2_exact(std::uint64_t m) {
  if (m == 0 || (m & (m - 1))) return -1;
  return std::countr_zero(m);
}

Rational floor_of(const Rational& q) {
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

Rational ceil_of(const Rational& q) {
  BigInt f;
  mpz_cdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

long ceil_log2(long L) {
  long k = 0;
  while ((1L << k) < L) ++k;
  return k;
}

std::uint64_t checked_pow(std::uint64_t base, int e, std::uint64_t cap, const char* what) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (base && r > cap / base) throw CapExceeded(std::string(what) + " exceeds the enumeration cap");
    r *= base;
  }
  return r;
}

Rational rational_field(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw ParseError("probabilities must be rational strings");
}

std::vector<Pmf> channel_field(const json& j, std::uint64_t rows, std::uint64_t cols, const std::string& what) {
  if (!j.is_array() || j.size() != rows)
    throw ValidationError(what + ": channel needs one row per joint message (" + std::to_string(rows) + ")");
  std::vector<Pmf> out;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols)
      throw ValidationError(what + ": channel row needs " + std::to_string(cols) + " entries");
    Pmf p;
    for (const auto& v : row) p.push_back(rational_field(v));
    try {
      check_pmf(p);
    } catch (const ValidationError& e) {
      throw ValidationError(what + ": " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto k : keys) ok = ok || it.key() == k;
    if (!ok) throw ParseError("unknown key '" + it.key() + "' in " + where);
  }
}

std::uint64_t digit(const WeakCode& w, std::uint64_t m, std::size_t s) {
  for (std::size_t i = 0; i < s; ++i) m /= w.sources[i].messages;
  return m % w.sources[s].messages;
}

// Layout of the L-fold message vector: source s occupies bits [off_s, off_s + L b_s).
struct Layout {
  int L = 1;
  std::vector<int> b, off, zoff, soff, ooff, n3, n2, side;
  int X = 0, n3tot = 0, n2tot = 0, otot = 0, B = 0;
  std::uint64_t M = 1;
};

Layout layout_of(const AmplifiedCode& code) {
  Layout lay;
  lay.L = code.options.L;
  lay.M = code.weak.joint_messages();
  for (const auto& sp : code.sources) {
    lay.b.push_back(sp.bits);
    lay.off.push_back(lay.X);
    lay.zoff.push_back(lay.n3tot);
    lay.soff.push_back(lay.n2tot);
    lay.ooff.push_back(lay.otot);
    lay.n3.push_back(sp.extractor.n3);
    lay.n2.push_back(sp.extractor.n2);
    lay.side.push_back(sp.side_bits);
    lay.X += sp.n1;
    lay.n3tot += sp.extractor.n3;
    lay.n2tot += sp.extractor.n2;
    lay.otot += sp.side_bits;
    lay.B += sp.bits;
  }
  return lay;
}

std::uint64_t seed_of(const Layout& lay, std::size_t s, std::uint64_t v) { return (v >> lay.soff[s]) & mask(lay.n2[s]); }

// Per-block output-bit masks over the joint message bits, when the view is a linear map.
std::optional<std::vector<std::uint64_t>> linear_view(const WeakCode& w, const EveView& e) {
  int ob = log2_exact(e.outputs);
  if (ob < 0) return std::nullopt;
  for (const auto& s : w.sources)
    if (log2_exact(s.messages) < 0) return std::nullopt;
  std::vector<std::uint64_t> f(e.channel.size());
  for (std::size_t m = 0; m < e.channel.size(); ++m) {
    int hit = -1;
    for (std::size_t y = 0; y < e.channel[m].size(); ++y) {
      if (e.channel[m][y] == 1) hit = static_cast<int>(y);
      else if (sgn(e.channel[m][y]) != 0) return std::nullopt;
    }
    if (hit < 0) return std::nullopt;
    f[m] = static_cast<std::uint64_t>(hit);
  }
  int B = log2_exact(f.size());
  for (std::size_t m = 0; m < f.size(); ++m) {
    std::uint64_t acc = 0;
    for (int j = 0; j < B; ++j)
      if (m >> j & 1) acc ^= f[std::size_t(1) << j];
    if (acc != f[m]) return std::nullopt;
  }
  std::vector<std::uint64_t> rows(ob, 0);
  for (int k = 0; k < ob; ++k)
    for (int j = 0; j < B; ++j)
      if (f[std::size_t(1) << j] >> k & 1) rows[k] |= std::uint64_t(1) << j;
  return rows;
}

// Joint bit j of a block message lands at X position off_s + l b_s + (j - sum_{s'<s} b_s').
std::uint64_t lift_block(const Layout& lay, std::uint64_t jmask, int l) {
  std::uint64_t out = 0;
  int base = 0;
  for (std::size_t s = 0; s < lay.b.size(); ++s) {
    std::uint64_t part = (jmask >> base) & mask(lay.b[s]);
    out |= part << (lay.off[s] + l * lay.b[s]);
    base += lay.b[s];
  }
  return out;
}

struct Chunked {
  static constexpr std::uint64_t kChunks = 64;
  template <class F>
  static void run(std::uint64_t total, unsigned jobs, F&& body) {
    jobs = std::max(1u, jobs);
    auto work = [&](unsigned w) {
      for (std::uint64_t c = w; c < kChunks; c += jobs) body(c, total * c / kChunks, total * (c + 1) / kChunks);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
  }
};

// Exact conditional entropies summed over seeds; falls back to long double when inexact.
struct EntSum {
  long double approx = 0;
  Rational exact = 0;
  bool is_exact = true;
  void add(const EntropyValue& e) {
    approx += e.approx;
    if (is_exact && e.exact) exact += *e.exact;
    else is_exact = false;
  }
  void add_int(long v) {
    approx += v;
    if (is_exact) exact += v;
  }
  void merge(const EntSum& o) {
    approx += o.approx;
    if (is_exact && o.is_exact) exact += o.exact;
    else is_exact = false;
  }
};

Pmf marginal_z(const Pmf& pz, const Layout& lay, std::size_t s) {
  Pmf out(std::size_t(1) << lay.n3[s], Rational(0));
  for (std::uint64_t z = 0; z < pz.size(); ++z) out[(z >> lay.zoff[s]) & mask(lay.n3[s])] += pz[z];
  return out;
}

}  // namespace

MinEntropy min_entropy(const Pmf& p) {
  if (p.empty()) throw ValidationError("min-entropy of an empty pmf");
  Rational mx = 0;
  for (const auto& x : p) mx = std::max(mx, x);
  if (sgn(mx) <= 0) throw ValidationError("min-entropy of an empty support");
  MinEntropy r;
  r.bits = -log2_of(mx);
  if (auto k = exact_log2(mx)) {
    r.exact = Rational(-*k);
    r.bits = static_cast<long double>(-*k);
  }
  return r;
}

DropTest min_entropy_drop_test(const std::vector<std::vector<Rational>>& joint, long lambda, std::uint64_t trials,
                               std::uint64_t seed) {
  if (joint.empty() || joint[0].empty()) throw ValidationError("empty joint pmf");
  const std::size_t nx = joint.size(), ny = joint[0].size();
  Pmf px(nx, Rational(0)), py(ny, Rational(0));
  Rational total = 0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (joint[x].size() != ny) throw ValidationError("ragged joint pmf");
    for (std::size_t y = 0; y < ny; ++y) {
      if (sgn(joint[x][y]) < 0) throw ValidationError("negative probability");
      px[x] += joint[x][y];
      py[y] += joint[x][y];
      total += joint[x][y];
    }
  }
  if (total != 1) throw ValidationError("joint pmf does not sum to 1");
  Rational pmax = *std::max_element(px.begin(), px.end());
  // max_x p(x|y) <= pmax |Y| 2^lambda  <=>  max_x p(x,y) <= p(y) pmax |Y| 2^lambda
  Rational scale = pmax * Rational(static_cast<long>(ny));
  if (lambda >= 0) scale *= Rational(pow2(static_cast<unsigned long>(lambda)));
  else scale /= Rational(pow2(static_cast<unsigned long>(-lambda)));
  std::vector<bool> good(ny, false);
  for (std::size_t y = 0; y < ny; ++y) {
    if (sgn(py[y]) == 0) continue;
    Rational m = 0;
    for (std::size_t x = 0; x < nx; ++x) m = std::max(m, joint[x][y]);
    good[y] = m <= py[y] * scale;
  }
  DropTest r;
  r.bound = 1 - (lambda >= 0 ? Rational(1) / Rational(pow2(static_cast<unsigned long>(lambda)))
                             : Rational(pow2(static_cast<unsigned long>(-lambda))));
  if (trials == 0) {
    r.frequency = 0;
    for (std::size_t y = 0; y < ny; ++y)
      if (good[y]) r.frequency += py[y];
  } else {
    std::vector<double> w(ny);
    for (std::size_t y = 0; y < ny; ++y) w[y] = to_double(py[y]);
    std::mt19937_64 rng(splitmix64(seed));
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) hits += good[pick(rng)];
    r.frequency = Rational(BigInt(std::to_string(hits)), BigInt(std::to_string(trials)));
    r.frequency.canonicalize();
    r.samples = trials;
  }
  r.holds = r.frequency >= r.bound;
  return r;
}

Rational total_variation(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size()) throw ValidationError("total variation needs equal alphabets");
  Rational d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) d += abs(Rational(p[i] - q[i]));
  return d / 2;
}

std::vector<std::vector<Rational>> maximal_coupling(const Pmf& p, const Pmf& q) {
  check_pmf(p);
  check_pmf(q);
  if (p.size() != q.size()) throw ValidationError("coupling needs equal alphabets");
  const std::size_t n = p.size();
  std::vector<std::vector<Rational>> J(n, std::vector<Rational>(n, Rational(0)));
  Pmf rp(n), rq(n);
  Rational d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    J[i][i] = std::min(p[i], q[i]);
    rp[i] = p[i] - J[i][i];
    rq[i] = q[i] - J[i][i];
    d += rp[i];
  }
  if (sgn(d) == 0) return J;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) J[i][j] = rp[i] * rq[j] / d;
  return J;
}

std::uint64_t WeakCode::joint_messages() const {
  std::uint64_t m = 1;
  for (const auto& s : sources) m *= s.messages;
  return m;
}

Rational WeakCode::eps() const { return std::max(declared_leakage, declared_error); }

WeakCode parse_weak_code(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("weak code: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("weak code must be a JSON object");
  reject_unknown(j, {"blocklength", "sources", "legit", "eavesdroppers", "declared"}, "weak code");
  WeakCode w;
  try {
    w.blocklength = j.at("blocklength").get<int>();
    if (w.blocklength < 1) throw ValidationError("blocklength must be positive");
    for (const auto& s : j.at("sources")) {
      reject_unknown(s, {"node", "messages"}, "weak code source");
      WeakSource ws{s.at("node").get<std::string>(), s.at("messages").get<std::uint64_t>()};
      if (ws.messages < 1) throw ValidationError("source " + ws.node + " has no messages");
      w.sources.push_back(ws);
    }
    if (w.sources.empty()) throw ValidationError("weak code has no sources");
    const std::uint64_t M = w.joint_messages();
    if (M > (std::uint64_t(1) << 16)) throw CapExceeded("weak code joint message alphabet above 2^16");
    for (const auto& l : j.value("legit", json::array())) {
      reject_unknown(l, {"sink", "source", "channel"}, "legit view");
      LegitView v;
      v.sink = l.at("sink").get<std::string>();
      std::string src = l.at("source").get<std::string>();
      auto it = std::find_if(w.sources.begin(), w.sources.end(), [&](const WeakSource& s) { return s.node == src; });
      if (it == w.sources.end()) throw ParseError("legit view references unknown source " + src);
      v.source = static_cast<std::size_t>(it - w.sources.begin());
      v.channel = channel_field(l.at("channel"), M, it->messages, "legit view " + v.sink);
      w.legit.push_back(std::move(v));
    }
    for (const auto& e : j.at("eavesdroppers")) {
      reject_unknown(e, {"name", "outputs", "channel"}, "eavesdropper view");
      EveView v;
      v.name = e.at("name").get<std::string>();
      v.outputs = e.at("outputs").get<std::uint64_t>();
      if (v.outputs < 1) throw ValidationError("eavesdropper " + v.name + " has no outputs");
      v.channel = channel_field(e.at("channel"), M, v.outputs, "eavesdropper " + v.name);
      w.eavesdroppers.push_back(std::move(v));
    }
    const auto& d = j.at("declared");
    reject_unknown(d, {"leakage", "error"}, "declared");
    w.declared_leakage = rational_field(d.at("leakage"));
    w.declared_error = rational_field(d.value("error", json("0")));
    if (sgn(w.declared_leakage) < 0 || sgn(w.declared_error) < 0)
      throw ValidationError("declared metrics must be nonnegative");
  } catch (const json::exception& e) {
    throw ParseError(std::string("weak code: ") + e.what());
  }
  return w;
}

WeakVerification verify_weak_code(const WeakCode& w) {
  WeakVerification out;
  const std::uint64_t M = w.joint_messages();
  const Rational pm(1, static_cast<long>(M));
  for (const auto& e : w.eavesdroppers) {
    Pmf py(e.outputs, Rational(0)), pmy, pmv(M, pm);
    for (std::uint64_t m = 0; m < M; ++m)
      for (std::uint64_t y = 0; y < e.outputs; ++y) {
        Rational p = pm * e.channel[m][y];
        py[y] += p;
        pmy.push_back(p);
      }
    auto hm = entropy_of(pmv), hy = entropy_of(py), hmy = entropy_of(pmy);
    WeakVerification::Leak l;
    l.name = e.name;
    l.bits.approx = hm.approx + hy.approx - hmy.approx;
    if (hm.exact && hy.exact && hmy.exact) {
      l.bits.exact = *hm.exact + *hy.exact - *hmy.exact;
      l.bits.approx = static_cast<long double>(l.bits.exact->get_d());
      l.per_use_exact = *l.bits.exact / w.blocklength;
    }
    l.per_use = l.bits.approx / w.blocklength;
    bool over;
    if (l.per_use_exact) {
      over = *l.per_use_exact > w.declared_leakage;
      l.equals_declared = *l.per_use_exact == w.declared_leakage;
    } else {
      long double dec = to_double(w.declared_leakage);
      over = l.per_use > dec + 1e-12L;
      l.equals_declared = std::fabs(l.per_use - dec) <= 1e-12L;
    }
    if (over)
      throw ValidationError("eavesdropper " + e.name + " leaks " + std::to_string(static_cast<double>(l.per_use)) +
                            " bits per use, above the declared " + to_string(w.declared_leakage));
    out.leakage.push_back(std::move(l));
  }
  for (const auto& v : w.legit) {
    Rational err = 0;
    for (std::uint64_t m = 0; m < M; ++m) err += pm * (1 - v.channel[m][digit(w, m, v.source)]);
    if (err > w.declared_error)
      throw ValidationError("legit view " + v.sink + " errs with probability " + to_string(err) +
                            ", above the declared " + to_string(w.declared_error));
    out.errors.push_back({v.sink, v.source, err});
  }
  return out;
}

LambdaChoice parse_lambda(std::string_view text) {
  LambdaChoice c;
  std::string t(text);
  if (t == "full") c.policy = LambdaPolicy::Full;
  else if (t == "auto") c.policy = LambdaPolicy::Auto;
  else {
    if (t.rfind("fixed:", 0) == 0) t = t.substr(6);
    try {
      std::size_t used = 0;
      c.value = std::stol(t, &used);
      if (used != t.size() || c.value < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError("lambda must be full, auto, fixed:K or a nonnegative integer");
    }
    c.policy = LambdaPolicy::Fixed;
  }
  return c;
}

AmplifiedCode amplify(const WeakCode& weak, const AmplifyOptions& opt) {
  if (opt.L < 1) throw SizingError("repetition count L must be at least 1");
  if (sgn(opt.eps2) <= 0 || opt.eps2 >= 1) throw SizingError("eps2 must lie in (0, 1)");
  if (sgn(opt.delta2) < 0 || opt.delta2 >= 1) throw SizingError("delta2 must lie in [0, 1)");
  if (sgn(opt.delta1) < 0) throw SizingError("delta1 must be nonnegative");
  AmplifiedCode code;
  code.weak = weak;
  code.options = opt;
  const int n = weak.blocklength;
  const Rational eps = weak.eps();
  const std::uint64_t M = weak.joint_messages();
  const Rational pm(1, static_cast<long>(M));

  for (std::size_t s = 0; s < weak.sources.size(); ++s) {
    SourcePlan sp;
    sp.node = weak.sources[s].node;
    sp.bits = log2_exact(weak.sources[s].messages);
    if (sp.bits < 0) throw ValidationError("source " + sp.node + ": message alphabet must be a power of two");
    if (sp.bits == 0) throw SizingError("source " + sp.node + " carries no message bits");
    sp.rate = Rational(sp.bits, n);
    sp.rate.canonicalize();
    sp.n1 = opt.L * sp.bits;
    if (sp.n1 > 64) throw CapExceeded("source " + sp.node + ": L * log|M| above 64 bits");
    sp.side_budget = Rational(opt.L) * (sp.bits * eps + 1);
    Rational side;
    if (opt.side == SidePolicy::Budget) {
      side = ceil_of(sp.side_budget);
    } else {
      // ceil(L max_t H(M_s | Mhat_{s->t}))
      side = 0;
      for (const auto& v : weak.legit) {
        if (v.source != s) continue;
        const std::uint64_t ms = weak.sources[s].messages;
        Pmf joint(ms * ms, Rational(0)), hat(ms, Rational(0));
        for (std::uint64_t m = 0; m < M; ++m)
          for (std::uint64_t k = 0; k < ms; ++k) {
            Rational p = pm * v.channel[m][k];
            joint[digit(weak, m, s) * ms + k] += p;
            hat[k] += p;
          }
        auto hj = entropy_of(joint), hh = entropy_of(hat);
        Rational need;
        if (hj.exact && hh.exact) need = ceil_of(Rational(opt.L) * (*hj.exact - *hh.exact));
        else need = Rational(static_cast<long>(std::ceil(opt.L * (hj.approx - hh.approx) - 1e-12L)));
        side = std::max(side, need);
      }
    }
    if (side > 62) throw CapExceeded("side message above 62 bits");
    sp.side_bits = static_cast<int>(side.get_num().get_si());
    sp.side_within = Rational(sp.side_bits) <= sp.side_budget;
    std::mt19937_64 rng(splitmix64(opt.seed + s));
    for (int i = 0; i < sp.side_bits; ++i) sp.syndrome.push_back(rng() & mask(sp.n1));
    sp.demands = static_cast<std::size_t>(
        std::count_if(weak.legit.begin(), weak.legit.end(), [&](const LegitView& v) { return v.source == s; }));
    code.sources.push_back(std::move(sp));
  }

  bool any_side = false;
  long side_total = 0;
  for (const auto& sp : code.sources) {
    any_side = any_side || sp.side_bits > 0;
    side_total += sp.side_bits;
  }
  switch (opt.lambda.policy) {
    case LambdaPolicy::Full: code.lambda = n + ceil_log2(opt.L); break;
    case LambdaPolicy::Fixed: code.lambda = opt.lambda.value; break;
    case LambdaPolicy::Auto: code.lambda = any_side ? n + ceil_log2(opt.L) : 0; break;
  }

  for (std::size_t s = 0; s < code.sources.size(); ++s) {
    auto& sp = code.sources[s];
    const Rational Lnr = Rational(opt.L * n) * sp.rate;
    sp.eps3 = 1 - (1 - opt.eps2) * (1 - eps / sp.rate) + Rational(side_total) / Lnr + Rational(code.lambda) / Lnr;
    sp.n3_target = (1 - sp.eps3 - opt.delta2) * sp.n1;
    Rational n3 = floor_of(sp.n3_target);
    if (n3 < 1)
      throw SizingError("extractor budget empty for source " + sp.node +
                        ": n3 = floor((1 - eps3 - delta2) * L*n*r) = floor((1 - " + to_string(sp.eps3) + " - " +
                        to_string(opt.delta2) + ") * " + std::to_string(sp.n1) + ") = " + to_string(n3));
    n3 = std::min(n3, Rational(sp.n1));
    sp.extractor = make_extractor_with_length(sp.n1, static_cast<int>(n3.get_num().get_si()), opt.hash);
    sp.extractor.delta = 1 - sp.eps3;
    sp.implied_eps = std::exp2(-(to_double((1 - sp.eps3) * sp.n1) - sp.extractor.n3) / 2);
    std::mt19937_64 rng(splitmix64(opt.seed + 1000 + s));
    sp.sample_seed = random_seed(sp.extractor, rng).str();
  }

  // rate accounting for carrying (V_s, O_s) over extra uses of the weak code
  Inflation& inf = code.inflation;
  inf.target = Rational(opt.L * n) * opt.delta2;
  Rational extra = 0, formula = 0;
  bool defined = true;
  for (const auto& sp : code.sources) {
    const Rational carried(sp.extractor.n2 + sp.side_bits);
    const Rational den = (sp.rate - eps) * (1 - Rational(static_cast<long>(sp.demands)) * eps) - Rational(1, n);
    if (sgn(den) <= 0) {
      defined = false;
      inf.note += "source " + sp.node + ": per-use rate (r - eps)(1 - |D| eps) - 1/n = " + to_string(den) +
                  " is not positive; ";
    } else {
      extra += carried / den;
      formula += (opt.delta1 * opt.L * n * sp.rate + Rational(opt.L) * (n * sp.rate * eps + 1)) / den;
    }
    const Rational per_block = sp.bits * (1 - Rational(static_cast<long>(sp.demands)) * eps) - 1;
    if (sgn(per_block) > 0) {
      inf.block_uses += static_cast<std::uint64_t>(ceil_of(carried / per_block).get_num().get_ui()) * n;
    } else {
      inf.note += "source " + sp.node + ": a block carries n r (1 - |D| eps) - 1 = " + to_string(per_block) +
                  " bits; ";
    }
  }
  if (defined) {
    inf.extra_uses = extra;
    inf.formula_uses = formula;
    inf.within = extra <= inf.target;
  }
  if (!inf.note.empty()) inf.note.pop_back(), inf.note.pop_back();
  return code;
}

PinskerCheck pinsker_check(const Pmf& p) {
  check_pmf(p);
  PinskerCheck r;
  const Rational u(1, static_cast<long>(p.size()));
  r.dtv = total_variation(p, Pmf(p.size(), u));
  mpfr_t x, l, pm, t, sum, lhs;
  mpfr_inits2(256, x, l, pm, t, sum, lhs, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_zero(sum, 1);
  // sum p ln(p |X|), every term rounded toward -inf
  for (const auto& q : p) {
    if (sgn(q) == 0) continue;
    Rational ratio = q / u;
    mpfr_set_q(x, ratio.get_mpq_t(), MPFR_RNDD);
    mpfr_log(l, x, MPFR_RNDD);
    mpfr_set_q(pm, q.get_mpq_t(), mpfr_sgn(l) >= 0 ? MPFR_RNDD : MPFR_RNDU);
    mpfr_mul(t, pm, l, MPFR_RNDD);
    mpfr_add(sum, sum, t, MPFR_RNDD);
  }
  Rational twice_d2 = 2 * r.dtv * r.dtv;
  mpfr_set_q(lhs, twice_d2.get_mpq_t(), MPFR_RNDU);
  r.divergence_lower = mpfr_get_ld(sum, MPFR_RNDD);
  r.holds = sgn(r.dtv) == 0 || mpfr_lessequal_p(lhs, sum);
  mpfr_clears(x, l, pm, t, sum, lhs, static_cast<mpfr_ptr>(nullptr));
  return r;
}

namespace {

struct EveCtx {
  const EveView* view = nullptr;
  std::optional<std::vector<std::uint64_t>> G;  // rows over X (linear views)
  int rank_go = 0;
  std::vector<std::vector<std::pair<std::uint64_t, Rational>>> support;  // per joint message
};

struct Evaluator {
  const AmplifiedCode& code;
  const AmplifyEvalOptions& opt;
  Layout lay;
  std::vector<EveCtx> eves;
  std::vector<std::uint64_t> O;  // side rows over X
  bool linear = true;
  std::uint64_t Mpow = 1;        // M^L
  std::vector<std::uint64_t> xs; // x for each message tuple
  std::vector<std::vector<std::uint64_t>> blocks;  // joint block messages per tuple

  Evaluator(const AmplifiedCode& c, const AmplifyEvalOptions& o) : code(c), opt(o), lay(layout_of(c)) {
    if (lay.X > 64) throw CapExceeded("message vector above 64 bits");
    if (lay.n3tot > 24) throw CapExceeded("extractor outputs above 24 bits in total");
    for (std::size_t s = 0; s < code.sources.size(); ++s)
      for (auto r : code.sources[s].syndrome) O.push_back(r << lay.off[s]);
    for (const auto& e : code.weak.eavesdroppers) {
      EveCtx ctx;
      ctx.view = &e;
      if (opt.allow_linear) {
        if (auto rows = linear_view(code.weak, e)) {
          std::vector<std::uint64_t> G;
          for (int l = 0; l < lay.L; ++l)
            for (auto r : *rows) G.push_back(lift_block(lay, r, l));
          ctx.G = G;
          auto go = G;
          if (opt.view_includes_side) go.insert(go.end(), O.begin(), O.end());
          ctx.rank_go = gf2_rank(go);
        }
      }
      linear = linear && ctx.G.has_value();
      ctx.support.resize(e.channel.size());
      for (std::size_t m = 0; m < e.channel.size(); ++m)
        for (std::uint64_t y = 0; y < e.outputs; ++y)
          if (sgn(e.channel[m][y]) != 0) ctx.support[m].push_back({y, e.channel[m][y]});
      eves.push_back(std::move(ctx));
    }
  }

  std::vector<std::uint64_t> extractor_matrix(std::uint64_t v) const {
    std::vector<std::uint64_t> A;
    for (std::size_t s = 0; s < code.sources.size(); ++s)
      for (auto r : extractor_rows(code.sources[s].extractor, seed_of(lay, s, v))) A.push_back(r << lay.off[s]);
    return A;
  }

  std::uint64_t syndrome(std::uint64_t x) const {
    std::uint64_t o = 0;
    for (std::size_t i = 0; i < O.size(); ++i) o |= std::uint64_t(std::popcount(O[i] & x) & 1) << i;
    return o;
  }

  static std::uint64_t apply(const std::vector<std::uint64_t>& A, std::uint64_t x) {
    std::uint64_t z = 0;
    for (std::size_t i = 0; i < A.size(); ++i) z |= std::uint64_t(std::popcount(A[i] & x) & 1) << i;
    return z;
  }

  void prepare_generic() {
    Mpow = checked_pow(lay.M, lay.L, opt.cap, "message tuples");
    xs.resize(Mpow);
    blocks.assign(Mpow, std::vector<std::uint64_t>(lay.L));
    for (std::uint64_t t = 0; t < Mpow; ++t) {
      std::uint64_t rest = t, x = 0;
      for (int l = 0; l < lay.L; ++l) {
        std::uint64_t m = rest % lay.M;
        rest /= lay.M;
        blocks[t][l] = m;
        for (std::size_t s = 0; s < code.sources.size(); ++s)
          x |= digit(code.weak, m, s) << (lay.off[s] + l * lay.b[s]);
      }
      xs[t] = x;
    }
  }

  // Per seed: H(Z|V=v) (or rank) and H(Z|Y,O,V=v) for each eavesdropper.
  struct SeedResult {
    EntropyValue hz;
    std::vector<EntropyValue> cond;
  };

  SeedResult seed_linear(std::uint64_t v, std::vector<std::uint64_t>* image) const {
    SeedResult r;
    auto A = extractor_matrix(v);
    int ra = gf2_rank(A);
    r.hz.approx = ra;
    r.hz.exact = Rational(ra);
    for (const auto& e : eves) {
      auto all = A;
      all.insert(all.end(), e.G->begin(), e.G->end());
      if (opt.view_includes_side) all.insert(all.end(), O.begin(), O.end());
      int c = gf2_rank(all) - e.rank_go;
      r.cond.push_back(EntropyValue{static_cast<long double>(c), Rational(c)});
    }
    if (image) {
      std::vector<std::uint64_t> cols(lay.X, 0);
      for (int j = 0; j < lay.X; ++j)
        for (std::size_t i = 0; i < A.size(); ++i)
          if (A[i] >> j & 1) cols[j] |= std::uint64_t(1) << i;
      *image = gf2_span(cols);
    }
    return r;
  }

  SeedResult seed_generic(std::uint64_t v, std::vector<std::uint64_t>* zcount) const {
    SeedResult r;
    auto A = extractor_matrix(v);
    std::vector<std::uint64_t> zs(Mpow), os(Mpow);
    std::map<std::uint64_t, std::uint64_t> zc;
    for (std::uint64_t t = 0; t < Mpow; ++t) {
      zs[t] = apply(A, xs[t]);
      os[t] = opt.view_includes_side ? syndrome(xs[t]) : 0;
      ++zc[zs[t]];
      if (zcount) ++(*zcount)[zs[t]];
    }
    const Rational pt(1, static_cast<long>(Mpow));
    Pmf pz;
    for (auto& [z, c] : zc) pz.push_back(Rational(static_cast<long>(c)) * pt);
    r.hz = entropy_of(pz);
    for (const auto& e : eves) {
      std::map<std::array<std::uint64_t, 3>, Rational> zyo;
      std::map<std::array<std::uint64_t, 2>, Rational> yo;
      for (std::uint64_t t = 0; t < Mpow; ++t) {
        std::function<void(int, std::uint64_t, std::uint64_t, const Rational&)> rec =
            [&](int l, std::uint64_t yidx, std::uint64_t stride, const Rational& w) {
              if (l == lay.L) {
                Rational p = w * pt;
                zyo[{zs[t], yidx, os[t]}] += p;
                yo[{yidx, os[t]}] += p;
                return;
              }
              for (const auto& [y, q] : e.support[blocks[t][l]]) rec(l + 1, yidx + y * stride, stride * e.view->outputs, w * q);
            };
        rec(0, 0, 1, Rational(1));
      }
      Pmf a, b;
      for (auto& [k, p] : zyo) a.push_back(p);
      for (auto& [k, p] : yo) b.push_back(p);
      auto ha = entropy_of(a), hb = entropy_of(b);
      EntropyValue c;
      c.approx = ha.approx - hb.approx;
      if (ha.exact && hb.exact) c.exact = *ha.exact - *hb.exact;
      r.cond.push_back(c);
    }
    return r;
  }
};

}  // namespace

AmplifiedEvaluation evaluate_amplified(const AmplifiedCode& code, const AmplifyEvalOptions& opt) {
  Evaluator ev(code, opt);
  const auto& lay = ev.lay;
  AmplifiedEvaluation out;
  const std::size_t ne = ev.eves.size();
  if (lay.n2tot > 62) throw CapExceeded("total seed length above 62 bits");
  const std::uint64_t seeds = std::uint64_t(1) << lay.n2tot;
  if (!ev.linear) ev.prepare_generic();
  out.method = opt.montecarlo ? "montecarlo" : (ev.linear ? "linear" : "generic");

  std::optional<Pmf> pz;  // exact law of M_bar (exhaustive only)
  if (!opt.montecarlo) {
    if (ev.linear) {
      if (seeds > opt.cap) throw CapExceeded("2^" + std::to_string(lay.n2tot) + " seeds exceed the enumeration cap");
    } else {
      std::uint64_t work = seeds;
      for (const auto& e : ev.eves) {
        std::uint64_t maxs = 1;
        for (const auto& s : e.support) maxs = std::max<std::uint64_t>(maxs, s.size());
        work = std::max(work, checked_pow(maxs, lay.L, opt.cap, "eavesdropper outputs"));
      }
      if (seeds > opt.cap / std::max<std::uint64_t>(1, ev.Mpow) || work > opt.cap / std::max<std::uint64_t>(1, ev.Mpow))
        throw CapExceeded("exhaustive evaluation exceeds the enumeration cap");
    }
    const std::uint64_t nz = std::uint64_t(1) << lay.n3tot;
    struct Part {
      EntSum hz;
      std::vector<EntSum> cond;
      std::vector<std::uint64_t> weight;
    };
    std::vector<Part> parts(Chunked::kChunks);
    Chunked::run(seeds, opt.jobs, [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
      Part& p = parts[c];
      p.cond.resize(ne);
      p.weight.assign(nz, 0);
      std::vector<std::uint64_t> image;
      for (std::uint64_t v = lo; v < hi; ++v) {
        Evaluator::SeedResult r;
        if (ev.linear) {
          r = ev.seed_linear(v, &image);
          const std::uint64_t w = std::uint64_t(1) << (lay.n3tot - static_cast<int>(r.hz.approx));
          for (auto z : image) p.weight[z] += w;
        } else {
          r = ev.seed_generic(v, &p.weight);
        }
        p.hz.add(r.hz);
        for (std::size_t i = 0; i < ne; ++i) p.cond[i].add(r.cond[i]);
      }
    });
    EntSum hz;
    std::vector<EntSum> cond(ne);
    std::vector<std::uint64_t> weight(nz, 0);
    for (auto& p : parts) {
      if (p.cond.empty()) continue;
      hz.merge(p.hz);
      for (std::size_t i = 0; i < ne; ++i) cond[i].merge(p.cond[i]);
      for (std::uint64_t z = 0; z < nz; ++z) weight[z] += p.weight[z];
    }
    const BigInt denom = ev.linear ? BigInt(pow2(lay.n2tot + lay.n3tot)) : BigInt(pow2(lay.n2tot)) * BigInt(std::to_string(ev.Mpow));
    pz = Pmf(nz);
    for (std::uint64_t z = 0; z < nz; ++z) {
      (*pz)[z] = Rational(BigInt(std::to_string(weight[z])), denom);
      (*pz)[z].canonicalize();
    }
    auto hm = entropy_of(*pz);
    const Rational S(pow2(lay.n2tot));
    for (std::size_t i = 0; i < ne; ++i) {
      AmplifiedLeakage l;
      l.name = ev.eves[i].view->name;
      l.method = out.method;
      l.bits = hm.approx - cond[i].approx / seeds;
      l.given_seed = (hz.approx - cond[i].approx) / seeds;
      l.seed_only = hm.approx - hz.approx / seeds;
      if (hm.exact && cond[i].is_exact) l.exact = *hm.exact - cond[i].exact / S;
      if (hz.is_exact && cond[i].is_exact) {
        l.given_seed_exact = (hz.exact - cond[i].exact) / S;
        l.given_seed = static_cast<long double>(l.given_seed_exact->get_d());
      }
      if (l.exact) l.bits = static_cast<long double>(l.exact->get_d());
      out.leakage.push_back(std::move(l));
    }
  } else {
    if (opt.trials == 0) throw SizingError("montecarlo evaluation needs trials > 0");
    const std::uint64_t shards = 16;
    struct Part {
      long double hz = 0;
      std::vector<long double> sum, sq;
    };
    std::vector<Part> parts(shards);
    auto work = [&](unsigned w) {
      for (std::uint64_t c = w; c < shards; c += std::max(1u, opt.jobs)) {
        Part& p = parts[c];
        p.sum.assign(ne, 0);
        p.sq.assign(ne, 0);
        std::mt19937_64 rng(splitmix64(opt.seed + c));
        std::uint64_t n = opt.trials * (c + 1) / shards - opt.trials * c / shards;
        for (std::uint64_t t = 0; t < n; ++t) {
          std::uint64_t v = rng() & mask(lay.n2tot);
          auto r = ev.linear ? ev.seed_linear(v, nullptr) : ev.seed_generic(v, nullptr);
          p.hz += r.hz.approx;
          for (std::size_t i = 0; i < ne; ++i) {
            p.sum[i] += r.cond[i].approx;
            p.sq[i] += r.cond[i].approx * r.cond[i].approx;
          }
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < std::max(1u, opt.jobs); ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
    long double hz = 0;
    std::vector<long double> sum(ne, 0), sq(ne, 0);
    for (auto& p : parts) {
      hz += p.hz;
      for (std::size_t i = 0; i < ne; ++i) sum[i] += p.sum[i], sq[i] += p.sq[i];
    }
    const long double T = static_cast<long double>(opt.trials);
    for (std::size_t i = 0; i < ne; ++i) {
      AmplifiedLeakage l;
      l.name = ev.eves[i].view->name;
      l.method = "montecarlo";
      long double mean = sum[i] / T;
      long double var = std::max<long double>(0, sq[i] / T - mean * mean);
      // H(M_bar) <= n3 total, so this is an upper estimate
      l.bits = lay.n3tot - mean;
      l.given_seed = hz / T - mean;
      l.seed_only = lay.n3tot - hz / T;
      l.ci95 = 1.96L * std::sqrt(var / T);
      out.leakage.push_back(std::move(l));
    }
  }

  // per-source law, Pinsker, end-to-end error through the maximal coupling
  for (std::size_t s = 0; s < code.sources.size(); ++s) {
    const auto& sp = code.sources[s];
    SourceEvaluation se;
    se.node = sp.node;
    const std::size_t nzs = std::size_t(1) << lay.n3[s];
    Pmf uniform(nzs, Rational(1, static_cast<long>(nzs)));
    std::optional<Pmf> ps;
    std::vector<std::vector<Rational>> J;
    if (pz) {
      ps = marginal_z(*pz, lay, s);
      se.dtv = total_variation(*ps, uniform);
      auto h = entropy_of(*ps);
      se.entropy = h.approx;
      se.divergence = std::max<long double>(0, lay.n3[s] - h.approx);
      auto pc = pinsker_check(*ps);
      se.divergence_lower = pc.divergence_lower;
      se.pinsker_holds = pc.holds;
      J = maximal_coupling(*ps, uniform);
    }
    const std::uint64_t ms = code.weak.sources[s].messages;
    const std::uint64_t M = lay.M;
    for (const auto& v : code.weak.legit) {
      if (v.source != s) continue;
      SourceEvaluation::E2E e2e;
      e2e.sink = v.sink;
      // marginal channel Q(mhat | m_s) for the decoder
      std::vector<Pmf> Q(ms, Pmf(ms, Rational(0)));
      const Rational share(static_cast<long>(ms), static_cast<long>(M));
      for (std::uint64_t m = 0; m < M; ++m)
        for (std::uint64_t k = 0; k < ms; ++k) Q[digit(code.weak, m, s)][k] += share * v.channel[m][k];
      const int b = lay.b[s], L = lay.L;
      auto score = [&](std::uint64_t cand, std::uint64_t hat) {
        Rational p = 1;
        for (int l = 0; l < L; ++l) p *= Q[(cand >> (l * b)) & mask(b)][(hat >> (l * b)) & mask(b)];
        return p;
      };
      std::vector<std::uint64_t> Hs = sp.syndrome;
      auto synd = [&](std::uint64_t x) {
        std::uint64_t o = 0;
        for (std::size_t i = 0; i < Hs.size(); ++i) o |= std::uint64_t(std::popcount(Hs[i] & x) & 1) << i;
        return o;
      };
      std::map<std::uint64_t, std::vector<std::uint64_t>> memo;
      auto decode = [&](std::uint64_t hat, std::uint64_t o) -> std::uint64_t {
        if (Hs.empty()) {
          std::uint64_t out = 0;
          for (int l = 0; l < L; ++l) {
            std::uint64_t h = (hat >> (l * b)) & mask(b), best = 0;
            for (std::uint64_t c = 1; c < ms; ++c)
              if (Q[c][h] > Q[best][h]) best = c;
            out |= best << (l * b);
          }
          return out;
        }
        auto it = memo.find(hat);
        if (it == memo.end()) {
          if (sp.n1 > 24) throw CapExceeded("side-information decoding above 2^24 candidates");
          std::vector<std::uint64_t> best(std::size_t(1) << Hs.size(), ~std::uint64_t(0));
          std::vector<Rational> bs(best.size(), Rational(-1));
          for (std::uint64_t c = 0; c < (std::uint64_t(1) << sp.n1); ++c) {
            auto sc = score(c, hat);
            auto k = synd(c);
            if (sc > bs[k]) bs[k] = sc, best[k] = c;
          }
          it = memo.emplace(hat, std::move(best)).first;
        }
        return it->second[o];
      };
      // joint law of (M_s^L, decoded M_s^L)
      std::map<std::pair<std::uint64_t, std::uint64_t>, Rational> pair;
      bool within_cap = true;
      try {
        const std::uint64_t tuples = checked_pow(M, L, opt.cap, "message tuples");
        std::uint64_t maxs = 1;
        std::vector<std::vector<std::pair<std::uint64_t, Rational>>> sup(M);
        for (std::uint64_t m = 0; m < M; ++m) {
          for (std::uint64_t k = 0; k < ms; ++k)
            if (sgn(v.channel[m][k]) != 0) sup[m].push_back({k, v.channel[m][k]});
          maxs = std::max<std::uint64_t>(maxs, sup[m].size());
        }
        if (checked_pow(maxs, L, opt.cap, "decoder inputs") > opt.cap / tuples)
          throw CapExceeded("end-to-end enumeration exceeds the cap");
        const Rational pt = Rational(1) / Rational(BigInt(std::to_string(tuples)));
        for (std::uint64_t t = 0; t < tuples; ++t) {
          std::uint64_t rest = t, x = 0;
          std::vector<std::uint64_t> bl(L);
          for (int l = 0; l < L; ++l) {
            bl[l] = rest % M;
            rest /= M;
            x |= digit(code.weak, bl[l], s) << (l * b);
          }
          const std::uint64_t o = synd(x);
          std::function<void(int, std::uint64_t, const Rational&)> rec = [&](int l, std::uint64_t hat, const Rational& w) {
            if (l == L) {
              pair[{x, decode(hat, o)}] += w * pt;
              return;
            }
            for (const auto& [k, q] : sup[bl[l]]) rec(l + 1, hat | (k << (l * b)), w * q);
          };
          rec(0, 0, Rational(1));
        }
      } catch (const CapExceeded&) {
        within_cap = false;
      }
      if (within_cap) {
        e2e.decoding_exact = std::all_of(pair.begin(), pair.end(), [](const auto& kv) { return kv.first.first == kv.first.second; });
        if (e2e.decoding_exact && se.dtv) {
          e2e.error = *se.dtv;
        } else if (ps && (std::uint64_t(1) << lay.n2[s]) <= opt.cap / std::max<std::size_t>(1, pair.size())) {
          // P(U != Mhat_bar) = 1 - sum P(z, zhat) J(z, zhat) / p(z)
          std::map<std::pair<std::uint64_t, std::uint64_t>, Rational> zz;
          const Rational pv(Rational(1) / Rational(pow2(lay.n2[s])));
          for (std::uint64_t vs = 0; vs < (std::uint64_t(1) << lay.n2[s]); ++vs) {
            auto A = extractor_rows(sp.extractor, vs);
            for (const auto& [k, p] : pair) zz[{Evaluator::apply(A, k.first), Evaluator::apply(A, k.second)}] += p * pv;
          }
          Rational agree = 0;
          for (const auto& [k, p] : zz)
            if (sgn((*ps)[k.first]) != 0) agree += p * J[k.first][k.second] / (*ps)[k.first];
          e2e.error = 1 - agree;
        }
      }
      se.end_to_end.push_back(std::move(e2e));
    }
    out.sources.push_back(std::move(se));
  }

  // event B: joint typicality of (M_S, Y_alpha) across the L blocks
  const Rational pm(1, static_cast<long>(lay.M));
  std::uint64_t max_out = 1;
  for (const auto& e : code.weak.eavesdroppers) max_out = std::max(max_out, e.outputs);
  for (const auto& e : code.weak.eavesdroppers) {
    EventB eb;
    eb.name = e.name;
    Pmf pairs;
    for (const auto& row : e.channel)
      for (const auto& q : row)
        if (sgn(q) != 0) pairs.push_back(pm * q);
    Rational pstar = *std::min_element(pairs.begin(), pairs.end());
    eb.typical_probability = typical_probability(pairs, lay.L, code.options.eps2);
    eb.gamma = 2 * code.options.eps2 * code.options.eps2 * pstar;
    eb.eta = 1 + std::log2(static_cast<long double>(code.weak.eavesdroppers.size()) * lay.M * max_out);
    eb.union_exponent_bound = std::exp2(-to_double(eb.gamma) * lay.L + eb.eta);
    const long double e2 = to_double(code.options.eps2);
    for (const auto& p : pairs) {
      long double q = to_double(p);
      eb.hoeffding += 2 * std::exp(-2 * lay.L * e2 * e2 * q * q);
    }
    eb.union_exponent_bound_holds = to_double(1 - eb.typical_probability) <= eb.union_exponent_bound;
    out.event_b.push_back(std::move(eb));
  }
  return out;
}

}  // namespace wiretap
