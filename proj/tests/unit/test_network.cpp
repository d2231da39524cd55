#include <doctest.h>

#include "oracles.hpp"
#include "wiretap/entropy.hpp"
#include "wiretap/network.hpp"

using namespace wiretap;

namespace {
const char* kCycle = R"({"nodes":["s","a","b","t"],
 "edges":[{"id":"x","tail":"s","head":"a","cap":"1"},{"id":"y","tail":"a","head":"b","cap":"1"},
          {"id":"z","tail":"b","head":"a","cap":"1"},{"id":"w","tail":"b","head":"t","cap":"1"}],
 "sources":["s"],"sinks":[{"node":"t","beta":["s"]}],"wiretap_sets":[]})";
}

TEST_SUITE("network") {
  TEST_CASE("butterfly parses with ground labels in order") {
    auto net = parse_network(oracle::fixture("butterfly.json"));
    CHECK(net.edges().size() == 9);
    CHECK(validate(net).ok);
    GroundSet g(net);
    REQUIRE(g.size() == 11);
    CHECK(g.labels()[0] == "m:s");
    CHECK(g.labels()[1] == "k:s");
    CHECK(g.labels()[2] == "e:e1");
    CHECK(g.labels()[10] == "e:e9");
    CHECK(g.messages() == 1u);
    CHECK(g.keys() == 2u);
    CHECK(g.edges({0, 8}) == ((1u << 2) | (1u << 10)));
  }

  TEST_CASE("topological order breaks ties by id") {
    auto net = parse_network(oracle::fixture("butterfly.json"));
    auto order = topological_order(net);
    CHECK(order == std::vector<std::string>{"s", "a", "b", "c", "d", "t1", "t2"});
  }

  TEST_CASE("cycles are rejected") {
    auto net = parse_network(kCycle);
    auto r = validate(net);
    CHECK_FALSE(r.ok);
    CHECK(r.violations.front().rule == "acyclic");
    CHECK_THROWS_AS(topological_order(net), ValidationError);
  }

  TEST_CASE("bad references and duplicates are parse errors") {
    CHECK_THROWS_AS(parse_network(R"({"nodes":["s","s"],"edges":[],"sources":["s"],"sinks":[],"wiretap_sets":[]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_network(R"({"nodes":["s","t"],"edges":[{"id":"e","tail":"s","head":"q","cap":"1"}],
      "sources":["s"],"sinks":[{"node":"t","beta":["s"]}],"wiretap_sets":[]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_network(R"({"nodes":["s","t"],"edges":[],"sources":["s"],
      "sinks":[{"node":"t","beta":["s"]}],"wiretap_sets":[["nope"]]})"),
                    ParseError);
    CHECK_THROWS_AS(parse_network("{not json"), ParseError);
    CHECK_THROWS_AS(parse_network(R"({"nodes":[],"edges":[],"sources":[],"sinks":[],"wiretap_sets":[],"extra":1})"),
                    ParseError);
  }

  TEST_CASE("sink demanding a non-source is flagged") {
    auto net = parse_network(R"({"nodes":["s","t"],"edges":[{"id":"e","tail":"s","head":"t","cap":"1"}],
      "sources":["s"],"sinks":[{"node":"t","beta":["t"]}],"wiretap_sets":[]})");
    auto r = validate(net);
    CHECK_FALSE(r.ok);
    CHECK(r.violations.front().rule == "demand");
  }

  TEST_CASE("serialization round trips") {
    auto net = parse_network(oracle::fixture("butterfly.json"));
    auto again = parse_network(serialize_network(net));
    CHECK(serialize_network(again) == serialize_network(net));
    CHECK(again.wiretap_sets() == net.wiretap_sets());
  }

  TEST_CASE("key promotion adds a key-only source") {
    auto net = parse_network(oracle::fixture("butterfly.json"));
    auto p = promote_key_node(net, "c", Rational(1));
    CHECK(p.sources().size() == 2);
    CHECK(p.sources().back().key_only);
    CHECK(p.edges().size() == 10);
    CHECK(validate(p).ok);
    CHECK_THROWS_AS(promote_key_node(net, "s", Rational(1)), ValidationError);
  }

  TEST_CASE("ground-set cap") {
    CHECK(max_ground_size() >= 11);
  }
}
