#pragma once
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wiretap/rational.hpp"

namespace wiretap {

struct Edge {
  std::string id;
  std::string tail;
  std::string head;
  Rational cap;
};

struct Source {
  std::string node;
  bool key_only = false;  // no message, only a key (promoted helper node)
};

struct Sink {
  std::string node;
  std::vector<std::string> beta;
};

// Immutable wiretap network. References are resolved at construction.
class Network {
 public:
  Network(std::vector<std::string> nodes, std::vector<Edge> edges, std::vector<Source> sources,
          std::vector<Sink> sinks, std::vector<std::vector<std::string>> wiretap_sets);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Source>& sources() const { return sources_; }
  const std::vector<Sink>& sinks() const { return sinks_; }
  const std::vector<std::vector<std::string>>& wiretap_sets() const { return wiretap_; }

  std::size_t edge_index(std::string_view id) const;
  std::size_t source_index(std::string_view node) const;
  bool has_node(std::string_view id) const { return node_ix_.count(std::string(id)) > 0; }
  bool is_source(std::string_view node) const { return src_ix_.count(std::string(node)) > 0; }
  bool is_sink(std::string_view node) const;

  // Edge indices in edge-list order.
  const std::vector<std::size_t>& in_edges(std::string_view node) const;
  const std::vector<std::size_t>& out_edges(std::string_view node) const;

  // Wiretap set as edge indices, in the order listed.
  std::vector<std::size_t> wiretap_edges(std::size_t alpha) const;

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<Source> sources_;
  std::vector<Sink> sinks_;
  std::vector<std::vector<std::string>> wiretap_;
  std::map<std::string, std::size_t> node_ix_, edge_ix_, src_ix_;
  std::vector<std::vector<std::size_t>> in_, out_;
};

struct Violation {
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

Network parse_network(std::string_view text);
std::string serialize_network(const Network& net);
ValidationReport validate(const Network& net);

// Kahn's algorithm, ties broken by smallest node id. Throws ValidationError on a cycle.
std::vector<std::string> topological_order(const Network& net);

// Adds a key-only source feeding v through a new edge of capacity cap.
Network promote_key_node(const Network& net, const std::string& v, const Rational& cap);

}  // namespace wiretap
