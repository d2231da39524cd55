#include "wiretap/network.hpp"

#include <json.hpp>
#include <queue>
#include <set>

namespace wiretap {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Network::Network(std::vector<std::string> nodes, std::vector<Edge> edges,
                 std::vector<Source> sources, std::vector<Sink> sinks,
                 std::vector<std::vector<std::string>> wiretap_sets)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      sources_(std::move(sources)),
      sinks_(std::move(sinks)),
      wiretap_(std::move(wiretap_sets)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!node_ix_.emplace(nodes_[i], i).second)
      throw ParseError("duplicate id: node \"" + nodes_[i] + "\"");
  auto need_node = [&](const std::string& n, const std::string& where) {
    if (!node_ix_.count(n)) throw ParseError("unknown node reference \"" + n + "\" in " + where);
  };
  in_.assign(nodes_.size(), {});
  out_.assign(nodes_.size(), {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (!edge_ix_.emplace(e.id, i).second) throw ParseError("duplicate id: edge \"" + e.id + "\"");
    need_node(e.tail, "edge " + e.id);
    need_node(e.head, "edge " + e.id);
    out_[node_ix_.at(e.tail)].push_back(i);
    in_[node_ix_.at(e.head)].push_back(i);
  }
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    need_node(sources_[i].node, "sources");
    if (!src_ix_.emplace(sources_[i].node, i).second)
      throw ParseError("duplicate id: source \"" + sources_[i].node + "\"");
  }
  std::set<std::string> seen_sinks;
  for (const auto& t : sinks_) {
    need_node(t.node, "sinks");
    if (!seen_sinks.insert(t.node).second) throw ParseError("duplicate id: sink \"" + t.node + "\"");
    for (const auto& b : t.beta) need_node(b, "demand of sink " + t.node);
  }
  for (const auto& a : wiretap_)
    for (const auto& e : a)
      if (!edge_ix_.count(e)) throw ParseError("unknown edge reference \"" + e + "\" in wiretap_sets");
}

std::size_t Network::edge_index(std::string_view id) const {
  auto it = edge_ix_.find(std::string(id));
  if (it == edge_ix_.end()) throw ParseError("unknown edge reference \"" + std::string(id) + "\"");
  return it->second;
}

std::size_t Network::source_index(std::string_view node) const {
  auto it = src_ix_.find(std::string(node));
  if (it == src_ix_.end()) throw ParseError("unknown source \"" + std::string(node) + "\"");
  return it->second;
}

bool Network::is_sink(std::string_view node) const {
  for (const auto& t : sinks_)
    if (t.node == node) return true;
  return false;
}

const std::vector<std::size_t>& Network::in_edges(std::string_view node) const {
  return in_.at(node_ix_.at(std::string(node)));
}

const std::vector<std::size_t>& Network::out_edges(std::string_view node) const {
  return out_.at(node_ix_.at(std::string(node)));
}

std::vector<std::size_t> Network::wiretap_edges(std::size_t alpha) const {
  std::vector<std::size_t> out;
  for (const auto& e : wiretap_.at(alpha)) out.push_back(edge_ix_.at(e));
  return out;
}

namespace {

const json& require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing key \"") + key + "\" in " + where);
  return *it;
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) throw ParseError(std::string(where) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ParseError("unknown key \"" + it.key() + "\" in " + where);
  }
}

std::string str(const json& j, const char* where) {
  if (!j.is_string()) throw ParseError(std::string("expected string in ") + where);
  return j.get<std::string>();
}

Rational rational_field(const json& j, const char* where) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(BigInt(j.dump()));
  throw ParseError(std::string("expected rational string in ") + where);
}

}  // namespace

Network parse_network(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  only_keys(j, {"nodes", "edges", "sources", "sinks", "wiretap_sets"}, "network");
  std::vector<std::string> nodes;
  for (const auto& n : require(j, "nodes", "network")) nodes.push_back(str(n, "nodes"));
  std::vector<Edge> edges;
  for (const auto& e : require(j, "edges", "network")) {
    only_keys(e, {"id", "tail", "head", "cap"}, "edge");
    edges.push_back({str(require(e, "id", "edge"), "edge id"), str(require(e, "tail", "edge"), "edge tail"),
                     str(require(e, "head", "edge"), "edge head"), rational_field(require(e, "cap", "edge"), "edge cap")});
  }
  std::vector<Source> sources;
  for (const auto& s : require(j, "sources", "network")) {
    if (s.is_string()) {
      sources.push_back({s.get<std::string>(), false});
    } else {
      only_keys(s, {"node", "key_only"}, "source");
      bool ko = s.contains("key_only") ? s.at("key_only").get<bool>() : false;
      sources.push_back({str(require(s, "node", "source"), "source node"), ko});
    }
  }
  std::vector<Sink> sinks;
  for (const auto& t : require(j, "sinks", "network")) {
    only_keys(t, {"node", "beta"}, "sink");
    Sink sk{str(require(t, "node", "sink"), "sink node"), {}};
    for (const auto& b : require(t, "beta", "sink")) sk.beta.push_back(str(b, "beta"));
    sinks.push_back(std::move(sk));
  }
  std::vector<std::vector<std::string>> wt;
  if (j.contains("wiretap_sets"))
    for (const auto& a : j.at("wiretap_sets")) {
      if (!a.is_array()) throw ParseError("wiretap set must be an array of edge ids");
      std::vector<std::string> set;
      for (const auto& e : a) set.push_back(str(e, "wiretap set"));
      wt.push_back(std::move(set));
    }
  return Network(std::move(nodes), std::move(edges), std::move(sources), std::move(sinks), std::move(wt));
}

std::string serialize_network(const Network& net) {
  ordered_json j;
  j["nodes"] = net.nodes();
  j["edges"] = ordered_json::array();
  for (const auto& e : net.edges())
    j["edges"].push_back({{"id", e.id}, {"tail", e.tail}, {"head", e.head}, {"cap", to_string(e.cap)}});
  j["sources"] = ordered_json::array();
  for (const auto& s : net.sources()) {
    if (s.key_only) j["sources"].push_back({{"node", s.node}, {"key_only", true}});
    else j["sources"].push_back(s.node);
  }
  j["sinks"] = ordered_json::array();
  for (const auto& t : net.sinks()) j["sinks"].push_back({{"node", t.node}, {"beta", t.beta}});
  j["wiretap_sets"] = net.wiretap_sets();
  return j.dump(2) + "\n";
}

namespace {

bool has_cycle(const Network& net) {
  std::map<std::string, int> indeg;
  for (const auto& n : net.nodes()) indeg[n] = 0;
  for (const auto& e : net.edges()) indeg[e.head]++;
  std::vector<std::string> stack;
  for (auto& [n, d] : indeg)
    if (d == 0) stack.push_back(n);
  std::size_t seen = 0;
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    ++seen;
    for (auto ei : net.out_edges(n))
      if (--indeg[net.edges()[ei].head] == 0) stack.push_back(net.edges()[ei].head);
  }
  return seen != net.nodes().size();
}

}  // namespace

ValidationReport validate(const Network& net) {
  ValidationReport r;
  auto add = [&](std::string rule, std::string detail) {
    r.violations.push_back({std::move(rule), std::move(detail)});
  };
  if (has_cycle(net)) add("acyclic", "graph not acyclic");
  for (const auto& s : net.sources()) {
    if (!net.in_edges(s.node).empty()) add("source-in", "source has incoming edge: " + s.node);
    if (net.is_sink(s.node)) add("source-sink", "node is both source and sink: " + s.node);
  }
  for (const auto& t : net.sinks()) {
    if (!net.out_edges(t.node).empty()) add("sink-out", "sink has outgoing edge: " + t.node);
    for (const auto& b : t.beta)
      if (!net.is_source(b)) add("demand", "sink " + t.node + " demands non-source " + b);
  }
  for (const auto& e : net.edges())
    if (sgn(e.cap) < 0) add("capacity", "negative capacity on edge " + e.id);
  r.ok = r.violations.empty();
  return r;
}

std::vector<std::string> topological_order(const Network& net) {
  std::map<std::string, int> indeg;
  for (const auto& n : net.nodes()) indeg[n] = 0;
  for (const auto& e : net.edges()) indeg[e.head]++;
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (auto& [n, d] : indeg)
    if (d == 0) ready.push(n);
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto n = ready.top();
    ready.pop();
    order.push_back(n);
    for (auto ei : net.out_edges(n))
      if (--indeg[net.edges()[ei].head] == 0) ready.push(net.edges()[ei].head);
  }
  if (order.size() != net.nodes().size()) throw ValidationError("cycle detected");
  return order;
}

Network promote_key_node(const Network& net, const std::string& v, const Rational& cap) {
  if (!net.has_node(v)) throw ValidationError("unknown node " + v);
  if (net.is_source(v) || net.is_sink(v))
    throw ValidationError("cannot promote a source or sink: " + v);
  if (sgn(cap) < 0) throw ValidationError("negative capacity");
  auto fresh = [&](std::string base, auto taken) {
    std::string name = base;
    for (int i = 2; taken(name); ++i) name = base + std::to_string(i);
    return name;
  };
  std::string s = fresh("key_" + v, [&](const std::string& n) { return net.has_node(n); });
  std::set<std::string> eids;
  for (const auto& e : net.edges()) eids.insert(e.id);
  std::string eid = fresh("key_" + v, [&](const std::string& n) { return eids.count(n) > 0; });
  auto nodes = net.nodes();
  nodes.push_back(s);
  auto edges = net.edges();
  edges.push_back({eid, s, v, cap});
  auto sources = net.sources();
  sources.push_back({s, true});
  return Network(nodes, edges, sources, net.sinks(), net.wiretap_sets());
}

}  // namespace wiretap
