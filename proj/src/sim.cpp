#include "wiretap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <random>
#include <thread>

namespace wiretap {

using nlohmann::json;

namespace {

Pmf pmf_field(const json& j) {
  Pmf p;
  for (const auto& v : j) {
    if (v.is_string()) p.push_back(parse_rational(v.get<std::string>()));
    else if (v.is_number_integer()) p.push_back(Rational(v.get<long>()));
    else throw ParseError("pmf entries must be rational strings");
  }
  check_pmf(p);
  return p;
}

}  // namespace

RvSystem parse_rv_system(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* allowed[] = {"network", "sources", "edges", "decoders", "scale", "slack"};
    if (std::find(std::begin(allowed), std::end(allowed), it.key()) == std::end(allowed))
      throw ParseError("unknown key \"" + it.key() + "\" in rv system");
  }
  Network net = parse_network(j.at("network").dump());
  json code;
  code["sources"] = json::array();
  std::vector<Pmf> pm(net.sources().size()), pk(net.sources().size());
  for (const auto& s : j.at("sources")) {
    for (auto it = s.begin(); it != s.end(); ++it)
      if (it.key() != "node" && it.key() != "pm" && it.key() != "pk")
        throw ParseError("unknown key \"" + it.key() + "\" in rv source");
    auto i = net.source_index(s.at("node").get<std::string>());
    pm[i] = pmf_field(s.at("pm"));
    pk[i] = pmf_field(s.at("pk"));
    code["sources"].push_back({{"node", s.at("node")}, {"messages", pm[i].size()}, {"keys", pk[i].size()}});
  }
  code["edges"] = j.at("edges");
  if (j.contains("decoders")) code["decoders"] = j.at("decoders");
  RvSystem rv{net, {}, pm, pk, 1, 0};
  for (std::size_t i = 0; i < pm.size(); ++i)
    if (pm[i].empty()) throw ValidationError("rv system does not describe source " + net.sources()[i].node);
  // Decoders are optional here, so skip the completeness check of parse_code_spec.
  rv.code.sources.resize(net.sources().size());
  for (std::size_t i = 0; i < pm.size(); ++i)
    rv.code.sources[i] = {static_cast<int>(pm[i].size()), static_cast<int>(pk[i].size())};
  rv.code.edges.resize(net.edges().size());
  std::vector<bool> seen(net.edges().size(), false);
  for (const auto& e : code["edges"]) {
    auto i = net.edge_index(e.at("id").get<std::string>());
    seen[i] = true;
    rv.code.edges[i].alphabet = e.at("alphabet").get<int>();
    rv.code.edges[i].table = e.at("table").get<std::vector<int>>();
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw ValidationError("rv system does not describe edge " + net.edges()[i].id);
  if (code.contains("decoders"))
    for (const auto& d : code["decoders"]) {
      std::size_t ti = net.sinks().size();
      for (std::size_t t = 0; t < net.sinks().size(); ++t)
        if (net.sinks()[t].node == d.at("sink").get<std::string>()) ti = t;
      if (ti == net.sinks().size()) throw ParseError("unknown sink in decoder");
      rv.code.decoders.push_back({ti, net.source_index(d.at("source").get<std::string>()),
                                  d.at("table").get<std::vector<int>>()});
    }
  // Reuse the table-shape checks with a placeholder decoder set.
  CodeSpec probe = rv.code;
  probe.decoders.clear();
  for (std::size_t t = 0; t < net.sinks().size(); ++t)
    for (const auto& b : net.sinks()[t].beta) {
      auto si = net.source_index(b);
      auto it = std::find_if(rv.code.decoders.begin(), rv.code.decoders.end(),
                             [&](const CodeSpec::Decoder& d) { return d.sink == t && d.source == si; });
      if (it != rv.code.decoders.end()) probe.decoders.push_back(*it);
      else probe.decoders.push_back({t, si, std::vector<int>(domain_size(probe, net, net.in_edges(net.sinks()[t].node)), 0)});
    }
  check_code_spec(probe, net);
  if (j.contains("scale")) rv.scale = parse_rational(j.at("scale").get<std::string>());
  if (j.contains("slack")) rv.slack = parse_rational(j.at("slack").get<std::string>());
  if (sgn(rv.scale) <= 0) throw ValidationError("scale must be positive");
  if (sgn(rv.slack) < 0) throw ValidationError("slack must be nonnegative");
  return rv;
}

JointPmf rv_joint(const RvSystem& rv) {
  const auto& net = rv.net;
  const std::size_t S = net.sources().size(), E = net.edges().size();
  GroundSet g(net);
  SymbolMap sm(net, rv.code);
  JointPmf out;
  out.alphabet.resize(g.size());
  std::uint64_t total = 1;
  for (std::size_t s = 0; s < S; ++s) {
    out.alphabet[g.message(s)] = static_cast<int>(rv.pm[s].size());
    out.alphabet[g.key(s)] = static_cast<int>(rv.pk[s].size());
    total *= rv.pm[s].size() * rv.pk[s].size();
  }
  for (std::size_t e = 0; e < E; ++e) out.alphabet[g.edge(e)] = rv.code.edges[e].alphabet;
  std::vector<int> m(S), k(S), w;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t r = idx;
    Rational p = 1;
    for (std::size_t s = S; s-- > 0;) {
      k[s] = static_cast<int>(r % rv.pk[s].size());
      r /= rv.pk[s].size();
      m[s] = static_cast<int>(r % rv.pm[s].size());
      r /= rv.pm[s].size();
      p *= rv.pm[s][m[s]] * rv.pk[s][k[s]];
    }
    if (sgn(p) == 0) continue;
    sm.run(m, k, w);
    std::vector<int> x(g.size());
    for (std::size_t s = 0; s < S; ++s) {
      x[g.message(s)] = m[s];
      x[g.key(s)] = k[s];
    }
    for (std::size_t e = 0; e < E; ++e) x[g.edge(e)] = w[e];
    out.support.push_back({std::move(x), p});
  }
  return out;
}

namespace {

Pmf marginal_pmf(const JointPmf& j, int var) {
  Pmf p(j.alphabet[var], Rational(0));
  for (const auto& [x, q] : j.support) p[x[var]] += q;
  return p;
}

long double log2l_(long double x) { return std::log2l(x); }

}  // namespace

SimCode build_sim(const RvSystem& rv, BoundMode mode, int nt, const Rational& eps) {
  if (nt < 1) throw ValidationError("n_t must be positive");
  if (sgn(eps) <= 0 || eps >= 1) throw ValidationError("eps must lie in (0, 1)");
  auto vr = validate(rv.net);
  if (!vr.ok) throw ValidationError("invalid network: " + vr.violations.front().detail);
  SimCode sim{rv};
  sim.mode = mode;
  sim.nt = nt;
  sim.eps = eps;
  const auto& net = rv.net;
  GroundSet g(net);
  JointPmf joint = rv_joint(rv);
  for (std::size_t s = 0; s < net.sources().size(); ++s) {
    sim.messages.push_back(typical_set(rv.pm[s], nt, eps));
    sim.keys.push_back(typical_set(rv.pk[s], nt, eps));
    if (sim.messages.back().empty() || sim.keys.back().empty())
      throw SizingError("empty typical set for source " + net.sources()[s].node +
                        ": increase n_t or eps");
  }
  long double worst = 0;
  bool any = false;
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    EdgeSizing es;
    es.pmf = marginal_pmf(joint, g.edge(e));
    es.typical_size = typical_set_size(es.pmf, nt, eps);
    if (typical_type_count(es.pmf, nt, eps) <= 1000000) {
      es.p_atypical = 1 - typical_probability(es.pmf, nt, eps);
    } else {
      long double b = 0;
      for (const auto& q : es.pmf)
        if (sgn(q) > 0) b += 2 * std::exp(-static_cast<long double>(eps.get_d() * eps.get_d() * nt * q.get_d() / 3));
      es.p_atypical = Rational(static_cast<double>(std::min<long double>(1, b)));
      es.p_atypical_bounded = true;
    }
    const Rational& c = net.edges()[e].cap;
    if (sgn(c) == 0) {
      int support = 0;
      for (const auto& q : es.pmf) support += sgn(q) > 0;
      if (support > 1)
        throw SizingError("edge " + net.edges()[e].id + " has zero capacity but a non-constant variable");
    } else {
      const long double ce = c.get_d(), ek = rv.slack.get_d(), ep = eps.get_d(), ak = rv.scale.get_d();
      long double term;
      if (mode == BoundMode::ZeroError) {
        term = (1 + ep) * (1 + ek / ce) +
               ak * log2l_(rv.code.edges[e].alphabet) * es.p_atypical.get_d() / ce;
      } else {
        if (eps >= c)
          throw SizingError("eps must be smaller than every positive capacity (edge " +
                            net.edges()[e].id + ")");
        term = (1 + ep) * (1 + ek / ce) / (1 - ep / ce);
      }
      worst = any ? std::max(worst, term) : term;
      any = true;
    }
    sim.edges.push_back(std::move(es));
  }
  sim.delta = any ? 2 * worst - 2 : 0;
  if (sim.delta < 0) sim.delta = 0;
  sim.n = static_cast<long>(std::ceil(nt * (1 + sim.delta) / rv.scale.get_d()));
  const long double ep = eps.get_d(), ak = rv.scale.get_d();
  for (std::size_t s = 0; s < net.sources().size(); ++s) {
    sim.rate.push_back(log2l_(sim.messages[s].size()) / sim.n);
    long double hm = entropy_of(rv.pm[s]).approx;
    long double denom = nt * (1 + sim.delta) + ak;
    sim.rate_bound.push_back(nt * (1 - ep) / denom * (ak * hm - rv.slack.get_d()) +
                             ak * log2l_(1 - ep) / denom);
  }
  // Decoders: given ones, otherwise read off the single-letter joint pmf.
  for (std::size_t t = 0; t < net.sinks().size(); ++t)
    for (const auto& b : net.sinks()[t].beta) {
      auto si = net.source_index(b);
      auto it = std::find_if(rv.code.decoders.begin(), rv.code.decoders.end(),
                             [&](const CodeSpec::Decoder& d) { return d.sink == t && d.source == si; });
      if (it != rv.code.decoders.end()) {
        sim.decoders.push_back(*it);
        continue;
      }
      const auto& in = net.in_edges(net.sinks()[t].node);
      std::size_t dom = domain_size(rv.code, net, in);
      std::vector<int> table(dom, -1);
      for (const auto& [x, q] : joint.support) {
        std::size_t ix = 0;
        for (auto e : in) ix = ix * rv.code.edges[e].alphabet + x[g.edge(e)];
        int mv = x[g.message(si)];
        if (table[ix] < 0 || mv < table[ix]) {
          if (table[ix] >= 0 && table[ix] != mv) sim.decoders_unique = false;
          table[ix] = table[ix] < 0 ? mv : std::min(table[ix], mv);
        } else if (table[ix] != mv) {
          sim.decoders_unique = false;
        }
      }
      for (auto& v : table) v = std::max(v, 0);
      sim.decoders.push_back({t, si, table});
    }
  return sim;
}

namespace {

using Key = std::vector<int>;
constexpr int kSentinel = -1;
constexpr int kSeparator = -2;

struct Accum {
  std::vector<std::map<Key, std::uint64_t>> edge;  // W_e
  std::vector<std::uint64_t> atypical;             // U_e^{n_t} outside T(U_e)
  std::vector<std::map<std::pair<std::uint64_t, Key>, std::uint64_t>> joint, joint_raw;
  std::vector<std::map<Key, std::uint64_t>> marg, marg_raw;
  std::map<std::uint64_t, std::uint64_t> msg;
  std::vector<std::uint64_t> wrong;
  std::uint64_t samples = 0;

  void merge(const Accum& o) {
    auto add = [](auto& a, const auto& b) {
      for (const auto& [k, v] : b) a[k] += v;
    };
    for (std::size_t i = 0; i < edge.size(); ++i) add(edge[i], o.edge[i]);
    for (std::size_t i = 0; i < atypical.size(); ++i) atypical[i] += o.atypical[i];
    for (std::size_t i = 0; i < joint.size(); ++i) {
      add(joint[i], o.joint[i]);
      add(joint_raw[i], o.joint_raw[i]);
      add(marg[i], o.marg[i]);
      add(marg_raw[i], o.marg_raw[i]);
    }
    add(msg, o.msg);
    for (std::size_t i = 0; i < wrong.size(); ++i) wrong[i] += o.wrong[i];
    samples += o.samples;
  }
};

class Runner {
 public:
  explicit Runner(const SimCode& sim) : sim_(sim), net_(sim.rv.net), sm_(net_, sim.rv.code) {
    const std::size_t S = net_.sources().size();
    total_ = 1;
    for (std::size_t s = 0; s < S; ++s) total_ *= sim.messages[s].size() * sim.keys[s].size();
    JointPmf joint = rv_joint(sim.rv);
    GroundSet g(net_);
    // typicality references for the asymptotic construction
    for (std::size_t s = 0; s < S; ++s) {
      Pmf p;
      for (const auto& a : sim.rv.pm[s])
        for (const auto& b : sim.rv.pk[s]) p.push_back(a * b);
      src_pmf_.push_back(p);
    }
    node_pmf_.resize(net_.nodes().size());
    for (std::size_t v = 0; v < net_.nodes().size(); ++v) {
      const auto& name = net_.nodes()[v];
      if (net_.is_source(name) || net_.out_edges(name).empty()) continue;
      const auto& in = net_.in_edges(name);
      Pmf p(domain_size(sim.rv.code, net_, in), Rational(0));
      for (const auto& [x, q] : joint.support) {
        std::size_t ix = 0;
        for (auto e : in) ix = ix * sim.rv.code.edges[e].alphabet + x[g.edge(e)];
        p[ix] += q;
      }
      node_pmf_[v] = p;
    }
    for (const auto& d : sim.decoders) {
      const auto& in = net_.in_edges(net_.sinks()[d.sink].node);
      std::size_t dom = domain_size(sim.rv.code, net_, in);
      Pmf p(sim.rv.pm[d.source].size() * dom, Rational(0));
      for (const auto& [x, q] : joint.support) {
        std::size_t ix = 0;
        for (auto e : in) ix = ix * sim.rv.code.edges[e].alphabet + x[g.edge(e)];
        p[x[g.message(d.source)] * dom + ix] += q;
      }
      dec_pmf_.push_back(p);
    }
    order_ = topological_order(net_);
  }

  std::uint64_t total() const { return total_; }

  Accum fresh() const {
    Accum a;
    a.edge.resize(net_.edges().size());
    a.atypical.assign(net_.edges().size(), 0);
    const auto A = net_.wiretap_sets().size();
    a.joint.resize(A);
    a.joint_raw.resize(A);
    a.marg.resize(A);
    a.marg_raw.resize(A);
    a.wrong.assign(sim_.decoders.size(), 0);
    return a;
  }

  void visit(std::uint64_t idx, Accum& acc) const {
    const std::size_t S = net_.sources().size(), E = net_.edges().size();
    const int nt = sim_.nt;
    std::vector<std::size_t> mi(S), ki(S);
    std::uint64_t r = idx, msg_id = 0;
    for (std::size_t s = S; s-- > 0;) {
      ki[s] = r % sim_.keys[s].size();
      r /= sim_.keys[s].size();
      mi[s] = r % sim_.messages[s].size();
      r /= sim_.messages[s].size();
    }
    for (std::size_t s = 0; s < S; ++s) msg_id = msg_id * sim_.messages[s].size() + mi[s];
    // U_e^{n_t} symbol by symbol
    std::vector<Sequence> u(E, Sequence(nt));
    std::vector<int> m(S), k(S), w;
    for (int i = 0; i < nt; ++i) {
      for (std::size_t s = 0; s < S; ++s) {
        m[s] = sim_.messages[s][mi[s]][i];
        k[s] = sim_.keys[s][ki[s]][i];
      }
      sm_.run(m, k, w);
      for (std::size_t e = 0; e < E; ++e) u[e][i] = w[e];
    }
    std::vector<bool> erased(E, false);
    if (sim_.mode == BoundMode::Asymptotic) {
      for (const auto& name : order_) {
        const auto& outs = net_.out_edges(name);
        if (outs.empty()) continue;
        bool kill = false;
        if (net_.is_source(name)) {
          auto s = net_.source_index(name);
          Sequence joint(nt);
          const auto& mseq = sim_.messages[s][mi[s]];
          const auto& kseq = sim_.keys[s][ki[s]];
          for (int i = 0; i < nt; ++i)
            joint[i] = mseq[i] * static_cast<int>(sim_.rv.pk[s].size()) + kseq[i];
          kill = !is_typical(joint, src_pmf_[s], sim_.eps);
        } else {
          const auto& in = net_.in_edges(name);
          for (auto e : in) kill = kill || erased[e];
          if (!kill) {
            Sequence joint(nt);
            for (int i = 0; i < nt; ++i) {
              std::size_t ix = 0;
              for (auto e : in) ix = ix * sim_.rv.code.edges[e].alphabet + u[e][i];
              joint[i] = static_cast<int>(ix);
            }
            std::size_t v = std::find(net_.nodes().begin(), net_.nodes().end(), name) - net_.nodes().begin();
            kill = !is_typical(joint, node_pmf_[v], sim_.eps);
          }
        }
        for (auto e : outs) erased[e] = kill;
      }
    }
    // decoding
    for (std::size_t d = 0; d < sim_.decoders.size(); ++d) {
      const auto& dec = sim_.decoders[d];
      const auto& in = net_.in_edges(net_.sinks()[dec.sink].node);
      const auto& truth = sim_.messages[dec.source][mi[dec.source]];
      std::vector<std::size_t> ix(nt, 0);
      for (int i = 0; i < nt; ++i)
        for (auto e : in) ix[i] = ix[i] * sim_.rv.code.edges[e].alphabet + u[e][i];
      bool wrong = false;
      if (sim_.mode == BoundMode::ZeroError) {
        for (int i = 0; i < nt && !wrong; ++i) wrong = dec.table[ix[i]] != truth[i];
      } else {
        const auto& book = sim_.messages[dec.source];
        std::size_t pick = 0;
        bool any_erased = false;
        for (auto e : in) any_erased = any_erased || erased[e];
        if (!any_erased) {
          const std::size_t dom = domain_size(sim_.rv.code, net_, in);
          Sequence joint(nt);
          for (std::size_t c = 0; c < book.size(); ++c) {
            for (int i = 0; i < nt; ++i) joint[i] = static_cast<int>(book[c][i] * dom + ix[i]);
            if (is_typical(joint, dec_pmf_[d], sim_.eps)) {
              pick = c;
              break;
            }
          }
        }
        wrong = book[pick] != truth;
      }
      if (wrong) ++acc.wrong[d];
    }
    // statistics
    for (std::size_t e = 0; e < E; ++e) {
      acc.edge[e][erased[e] ? Key{kSentinel} : u[e]]++;
      if (!is_typical(u[e], sim_.edges[e].pmf, sim_.eps)) ++acc.atypical[e];
    }
    for (std::size_t a = 0; a < net_.wiretap_sets().size(); ++a) {
      Key wk, uk;
      for (auto e : net_.wiretap_edges(a)) {
        if (erased[e]) wk.push_back(kSentinel);
        else wk.insert(wk.end(), u[e].begin(), u[e].end());
        wk.push_back(kSeparator);
        uk.insert(uk.end(), u[e].begin(), u[e].end());
        uk.push_back(kSeparator);
      }
      acc.joint[a][{msg_id, wk}]++;
      acc.marg[a][wk]++;
      acc.joint_raw[a][{msg_id, uk}]++;
      acc.marg_raw[a][uk]++;
    }
    acc.msg[msg_id]++;
    acc.samples++;
  }

 private:
  const SimCode& sim_;
  const Network& net_;
  SymbolMap sm_;
  std::uint64_t total_;
  std::vector<Pmf> src_pmf_, node_pmf_, dec_pmf_;
  std::vector<std::string> order_;
};

template <class Map>
EntropyValue entropy_counts(const Map& m, std::uint64_t total) {
  std::vector<Rational> masses;
  masses.reserve(m.size());
  const Rational t(BigInt(std::to_string(total)));
  for (const auto& [k, c] : m) masses.push_back(Rational(BigInt(std::to_string(c))) / t);
  return entropy_of(masses);
}

struct Leakage {
  EntropyValue bits;
  bool factorizes;
};

Leakage leakage(const std::map<std::pair<std::uint64_t, Key>, std::uint64_t>& joint,
                const std::map<Key, std::uint64_t>& marg,
                const std::map<std::uint64_t, std::uint64_t>& msg, std::uint64_t total) {
  bool fact = joint.size() == marg.size() * msg.size();
  if (fact)
    for (const auto& [k, c] : joint) {
      BigInt lhs = BigInt(std::to_string(c)) * BigInt(std::to_string(total));
      BigInt rhs = BigInt(std::to_string(msg.at(k.first))) * BigInt(std::to_string(marg.at(k.second)));
      if (lhs != rhs) {
        fact = false;
        break;
      }
    }
  Leakage out{{}, fact};
  if (fact) {
    out.bits.exact = Rational(0);
    return out;
  }
  auto hm = entropy_counts(msg, total), hw = entropy_counts(marg, total), hj = entropy_counts(joint, total);
  if (hm.exact && hw.exact && hj.exact) {
    out.bits.exact = *hm.exact + *hw.exact - *hj.exact;
    out.bits.approx = static_cast<long double>(out.bits.exact->get_d());
  } else {
    out.bits.approx = std::max<long double>(0, hm.approx + hw.approx - hj.approx);
  }
  return out;
}

}  // namespace

SimMetrics run_sim(const SimCode& sim, const SimOptions& opt) {
  Runner runner(sim);
  const auto& net = sim.rv.net;
  SimMetrics out;
  out.mode = sim.mode;
  out.exhaustive = opt.trials == 0;
  if (out.exhaustive && runner.total() > opt.state_cap)
    throw CapExceeded("exhaustive simulation needs " + std::to_string(runner.total()) +
                      " codeword combinations, over the cap; pass --trials with --seed");
  // Fixed work split so results do not depend on the worker count.
  const std::size_t chunks = out.exhaustive ? 64 : 16;
  std::vector<Accum> parts(chunks, runner.fresh());
  auto work = [&](std::size_t c) {
    if (out.exhaustive) {
      std::uint64_t lo = runner.total() * c / chunks, hi = runner.total() * (c + 1) / chunks;
      for (std::uint64_t i = lo; i < hi; ++i) runner.visit(i, parts[c]);
    } else {
      std::uint64_t count = opt.trials / chunks + (c < opt.trials % chunks ? 1 : 0);
      std::mt19937_64 rng(splitmix64(opt.seed + c));
      std::uniform_int_distribution<std::uint64_t> pick(0, runner.total() - 1);
      for (std::uint64_t i = 0; i < count; ++i) runner.visit(pick(rng), parts[c]);
    }
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(chunks)));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t c = t; c < chunks; c += jobs) work(c);
    });
  for (auto& th : pool) th.join();
  Accum acc = runner.fresh();
  for (const auto& p : parts) acc.merge(p);
  out.samples = acc.samples;
  const std::uint64_t total = acc.samples;
  const Rational tot(BigInt(std::to_string(total)));

  for (std::size_t d = 0; d < sim.decoders.size(); ++d)
    out.errors.push_back({net.sinks()[sim.decoders[d].sink].node,
                          net.sources()[sim.decoders[d].source].node, acc.wrong[d],
                          Rational(BigInt(std::to_string(acc.wrong[d]))) / tot});
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    SimMetrics::EdgeCheck ec;
    ec.id = net.edges()[e].id;
    ec.entropy = entropy_counts(acc.edge[e], total);
    ec.capacity_bits = Rational(sim.n) * net.edges()[e].cap;
    ec.p_atypical_measured = Rational(BigInt(std::to_string(acc.atypical[e]))) / tot;
    ec.entropy_bound = 1 + std::log2l(sim.edges[e].typical_size.get_d()) +
                       sim.nt * std::log2l(sim.rv.code.edges[e].alphabet) * ec.p_atypical_measured.get_d();
    if (ec.entropy.exact) ec.within_capacity = *ec.entropy.exact <= ec.capacity_bits;
    else ec.within_capacity = ec.entropy.approx <= ec.capacity_bits.get_d() + 1e-9;
    // (|T| + 1)^den <= 2^(n num)
    const auto& c = net.edges()[e].cap;
    BigInt lhs;
    mpz_pow_ui(lhs.get_mpz_t(), BigInt(sim.edges[e].typical_size + 1).get_mpz_t(), c.get_den().get_ui());
    BigInt exp2 = sim.n * c.get_num();
    ec.fixed_length_ok = lhs <= pow2(exp2.get_ui());
    out.edges.push_back(ec);
  }
  long double hk = 0;
  for (const auto& pk : sim.rv.pk) hk += entropy_of(pk).approx;
  const long double ep = sim.eps.get_d(), n = sim.n;
  const long double S = net.sources().size();
  for (std::size_t a = 0; a < net.wiretap_sets().size(); ++a) {
    SimMetrics::Leak lk;
    lk.alpha = net.wiretap_sets()[a];
    auto l = leakage(acc.joint[a], acc.marg[a], acc.msg, total);
    auto raw = leakage(acc.joint_raw[a], acc.marg_raw[a], acc.msg, total);
    lk.bits = l.bits;
    lk.factorizes = l.factorizes;
    lk.raw_bits = raw.bits;
    lk.per_symbol = l.bits.approx / n;
    lk.rhs = S * std::log2l(1 - ep) / n + 2 * ep * (sim.nt / n) * hk;
    lk.rhs_reversed = -S * std::log2l(1 - ep) / n + 2 * ep * (sim.nt / n) * hk;
    const long double sz = lk.alpha.size();
    lk.erasure_bound = raw.bits.approx + sz;
    lk.erasure_bound_log = raw.bits.approx + std::log2l(sz);
    out.leakage.push_back(lk);
  }
  return out;
}

}  // namespace wiretap
