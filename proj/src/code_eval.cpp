#include "wiretap/code.hpp"

#include <cmath>
#include <json.hpp>
#include <map>

namespace wiretap {

using nlohmann::json;

namespace {

std::vector<int> int_table(const json& j, const char* where) {
  if (!j.is_array()) throw ParseError(std::string(where) + ": table must be an array");
  std::vector<int> t;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ParseError(std::string(where) + ": table entries must be integers");
    t.push_back(v.get<int>());
  }
  return t;
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) throw ParseError(std::string(where) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ParseError("unknown key \"" + it.key() + "\" in " + where);
  }
}

std::size_t sink_index(const Network& net, const std::string& node) {
  for (std::size_t i = 0; i < net.sinks().size(); ++i)
    if (net.sinks()[i].node == node) return i;
  throw ParseError("unknown sink \"" + node + "\"");
}

}  // namespace

std::size_t domain_size(const CodeSpec& code, const Network&, const std::vector<std::size_t>& in) {
  std::size_t d = 1;
  for (auto e : in) d *= static_cast<std::size_t>(code.edges[e].alphabet);
  return d;
}

void check_code_spec(const CodeSpec& code, const Network& net) {
  if (code.sources.size() != net.sources().size())
    throw ValidationError("code lists " + std::to_string(code.sources.size()) + " sources, network has " +
                          std::to_string(net.sources().size()));
  if (code.edges.size() != net.edges().size())
    throw ValidationError("code lists " + std::to_string(code.edges.size()) + " edges, network has " +
                          std::to_string(net.edges().size()));
  for (const auto& s : code.sources)
    if (s.messages < 1 || s.keys < 1) throw ValidationError("alphabet sizes must be at least 1");
  for (std::size_t e = 0; e < code.edges.size(); ++e) {
    const auto& em = code.edges[e];
    const auto& edge = net.edges()[e];
    if (em.alphabet < 1) throw ValidationError("edge " + edge.id + ": alphabet must be at least 1");
    std::size_t dom;
    if (net.is_source(edge.tail)) {
      const auto& s = code.sources[net.source_index(edge.tail)];
      dom = static_cast<std::size_t>(s.messages) * s.keys;
    } else {
      dom = domain_size(code, net, net.in_edges(edge.tail));
    }
    if (em.table.size() != dom)
      throw ValidationError("edge " + edge.id + ": table has " + std::to_string(em.table.size()) +
                            " entries, domain has " + std::to_string(dom));
    for (int v : em.table)
      if (v < 0 || v >= em.alphabet) throw ValidationError("edge " + edge.id + ": table value out of range");
  }
  for (const auto& d : code.decoders) {
    const auto& t = net.sinks().at(d.sink);
    std::size_t dom = domain_size(code, net, net.in_edges(t.node));
    if (d.table.size() != dom)
      throw ValidationError("decoder at " + t.node + ": table has " + std::to_string(d.table.size()) +
                            " entries, domain has " + std::to_string(dom));
    for (int v : d.table)
      if (v < 0 || v >= code.sources[d.source].messages)
        throw ValidationError("decoder at " + t.node + ": value out of range");
  }
  for (std::size_t ti = 0; ti < net.sinks().size(); ++ti)
    for (const auto& b : net.sinks()[ti].beta) {
      auto si = net.source_index(b);
      bool found = false;
      for (const auto& d : code.decoders) found = found || (d.sink == ti && d.source == si);
      if (!found) throw ValidationError("no decoder for source " + b + " at sink " + net.sinks()[ti].node);
    }
}

CodeSpec parse_code_spec(std::string_view text, const Network& net) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  only_keys(j, {"sources", "edges", "decoders"}, "code");
  CodeSpec code;
  code.sources.resize(net.sources().size());
  std::vector<bool> seen_s(net.sources().size(), false);
  for (const auto& s : j.at("sources")) {
    only_keys(s, {"node", "messages", "keys"}, "code source");
    auto i = net.source_index(s.at("node").get<std::string>());
    seen_s[i] = true;
    code.sources[i] = {s.at("messages").get<int>(), s.at("keys").get<int>()};
  }
  for (std::size_t i = 0; i < seen_s.size(); ++i)
    if (!seen_s[i]) throw ValidationError("code does not describe source " + net.sources()[i].node);
  code.edges.resize(net.edges().size());
  std::vector<bool> seen_e(net.edges().size(), false);
  for (const auto& e : j.at("edges")) {
    only_keys(e, {"id", "alphabet", "table"}, "code edge");
    auto i = net.edge_index(e.at("id").get<std::string>());
    if (seen_e[i]) throw ParseError("duplicate id: edge " + net.edges()[i].id);
    seen_e[i] = true;
    code.edges[i] = {e.at("alphabet").get<int>(), int_table(e.at("table"), "edge")};
  }
  for (std::size_t i = 0; i < seen_e.size(); ++i)
    if (!seen_e[i]) throw ValidationError("code does not describe edge " + net.edges()[i].id);
  if (j.contains("decoders"))
    for (const auto& d : j.at("decoders")) {
      only_keys(d, {"sink", "source", "table"}, "decoder");
      code.decoders.push_back({sink_index(net, d.at("sink").get<std::string>()),
                               net.source_index(d.at("source").get<std::string>()),
                               int_table(d.at("table"), "decoder")});
    }
  check_code_spec(code, net);
  return code;
}

SymbolMap::SymbolMap(const Network& net, const CodeSpec& code) : net_(net), code_(code) {
  auto order = topological_order(net);
  for (const auto& v : order)
    for (auto e : net.out_edges(v)) edge_order_.push_back(e);
  src_of_edge_.assign(net.edges().size(), -1);
  in_of_edge_.resize(net.edges().size());
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    const auto& tail = net.edges()[e].tail;
    if (net.is_source(tail)) src_of_edge_[e] = static_cast<int>(net.source_index(tail));
    else in_of_edge_[e] = net.in_edges(tail);
  }
}

std::size_t SymbolMap::input_index(const std::vector<std::size_t>& in, const std::vector<int>& w) const {
  std::size_t ix = 0;
  for (auto e : in) ix = ix * code_.edges[e].alphabet + w[e];
  return ix;
}

void SymbolMap::run(const std::vector<int>& m, const std::vector<int>& k, std::vector<int>& w) const {
  w.assign(net_.edges().size(), 0);
  for (auto e : edge_order_) {
    std::size_t ix;
    if (int s = src_of_edge_[e]; s >= 0) ix = static_cast<std::size_t>(m[s]) * code_.sources[s].keys + k[s];
    else ix = input_index(in_of_edge_[e], w);
    w[e] = code_.edges[e].table[ix];
  }
}

int SymbolMap::decode(const CodeSpec::Decoder& d, const std::vector<int>& w) const {
  return d.table[input_index(net_.in_edges(net_.sinks()[d.sink].node), w)];
}

EntropyValue marginal_entropy(const JointPmf& pmf, Subset mask) {
  std::map<std::vector<int>, Rational> marg;
  const int n = static_cast<int>(pmf.alphabet.size());
  for (const auto& [x, p] : pmf.support) {
    if (sgn(p) == 0) continue;
    std::vector<int> key;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) key.push_back(x[i]);
    marg[key] += p;
  }
  std::vector<Rational> masses;
  for (auto& [k, p] : marg) masses.push_back(p);
  return entropy_of(masses);
}

MutualInfo mutual_information(const JointPmf& pmf, Subset a, Subset b) {
  const int n = static_cast<int>(pmf.alphabet.size());
  auto project = [&](const std::vector<int>& x, Subset mask) {
    std::vector<int> key;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) key.push_back(x[i]);
    return key;
  };
  std::map<std::vector<int>, Rational> pa, pb;
  std::map<std::pair<std::vector<int>, std::vector<int>>, Rational> pab;
  for (const auto& [x, p] : pmf.support) {
    if (sgn(p) == 0) continue;
    auto ka = project(x, a), kb = project(x, b);
    pa[ka] += p;
    pb[kb] += p;
    pab[{ka, kb}] += p;
  }
  bool fact = pab.size() == pa.size() * pb.size();
  if (fact)
    for (auto& [k, p] : pab)
      if (p != pa[k.first] * pb[k.second]) {
        fact = false;
        break;
      }
  MutualInfo mi{{}, fact};
  if (fact) {
    mi.bits.exact = Rational(0);
    return mi;
  }
  auto ha = marginal_entropy(pmf, a), hb = marginal_entropy(pmf, b), hab = marginal_entropy(pmf, a | b);
  if (ha.exact && hb.exact && hab.exact) {
    mi.bits.exact = *ha.exact + *hb.exact - *hab.exact;
    mi.bits.approx = static_cast<long double>(mi.bits.exact->get_d());
  } else {
    mi.bits.approx = std::max<long double>(0, ha.approx + hb.approx - hab.approx);
  }
  return mi;
}

CodeEvaluation evaluate_code(const Network& net, const CodeSpec& code, std::uint64_t state_cap) {
  check_code_spec(code, net);
  auto vr = validate(net);
  if (!vr.ok) throw ValidationError("invalid network: " + vr.violations.front().detail);
  const std::size_t S = net.sources().size(), E = net.edges().size();
  long double states = 1;
  for (const auto& s : code.sources) states *= static_cast<long double>(s.messages) * s.keys;
  if (states > static_cast<long double>(state_cap))
    throw CapExceeded("code has " + std::to_string(static_cast<double>(states)) +
                      " input tuples, over the cap of " + std::to_string(state_cap));
  GroundSet g(net);
  SymbolMap sm(net, code);
  CodeEvaluation out;
  out.joint.alphabet.resize(g.size());
  for (std::size_t s = 0; s < S; ++s) {
    out.joint.alphabet[g.message(s)] = code.sources[s].messages;
    out.joint.alphabet[g.key(s)] = code.sources[s].keys;
  }
  for (std::size_t e = 0; e < E; ++e) out.joint.alphabet[g.edge(e)] = code.edges[e].alphabet;

  const auto total = static_cast<std::uint64_t>(states);
  const Rational p(1, BigInt(std::to_string(total)));
  std::vector<int> m(S, 0), k(S, 0), w;
  std::vector<std::uint64_t> wrong(code.decoders.size(), 0);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t r = idx;
    for (std::size_t s = S; s-- > 0;) {
      k[s] = static_cast<int>(r % code.sources[s].keys);
      r /= code.sources[s].keys;
      m[s] = static_cast<int>(r % code.sources[s].messages);
      r /= code.sources[s].messages;
    }
    sm.run(m, k, w);
    std::vector<int> x(g.size());
    for (std::size_t s = 0; s < S; ++s) {
      x[g.message(s)] = m[s];
      x[g.key(s)] = k[s];
    }
    for (std::size_t e = 0; e < E; ++e) x[g.edge(e)] = w[e];
    out.joint.support.push_back({std::move(x), p});
    for (std::size_t d = 0; d < code.decoders.size(); ++d)
      if (sm.decode(code.decoders[d], w) != m[code.decoders[d].source]) ++wrong[d];
  }
  for (std::size_t d = 0; d < code.decoders.size(); ++d)
    out.errors.push_back({net.sinks()[code.decoders[d].sink].node,
                          net.sources()[code.decoders[d].source].node,
                          Rational(wrong[d]) * p});
  for (std::size_t a = 0; a < net.wiretap_sets().size(); ++a) {
    auto mi = mutual_information(out.joint, g.messages(), g.edges(net.wiretap_edges(a)));
    out.leakage.push_back({net.wiretap_sets()[a], mi.bits, mi.factorizes});
  }
  if (g.size() <= max_ground_size()) out.entropy = entropy_vector_of_pmf(out.joint);
  for (std::size_t e = 0; e < E; ++e) {
    out.rate_variable.push_back(marginal_entropy(out.joint, Subset(1) << g.edge(e)));
    out.rate_fixed.push_back(std::log2l(static_cast<long double>(code.edges[e].alphabet)));
  }
  return out;
}

}  // namespace wiretap
