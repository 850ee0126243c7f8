#include <doctest.h>

#include <sstream>

#include "bruteforce.hpp"
#include "core/graph.hpp"
#include "core/harness.hpp"
#include "core/text_format.hpp"

using namespace frasim;

TEST_CASE("route accessors") {
  Route r{2, 1, 3, 0};
  CHECK(r.owner() == 2);
  CHECK(r.last() == 0);
  CHECK(r.length() == 3);
  CHECK(r.next_hop() == 1);
  CHECK(r.prefix_to(3) == Route{2, 1, 3});
  CHECK(r.suffix_from(1) == Route{1, 3, 0});
  CHECK(r.pred(1) == 2);
  CHECK(r.succ(1) == 3);
  CHECK_FALSE(r.pred(2).has_value());
  CHECK_FALSE(r.succ(0).has_value());
  CHECK_THROWS(r.suffix_from(9));
  CHECK(r.is_simple());
  CHECK_FALSE(Route{1, 2, 1, 0}.is_simple());
  Route empty;
  CHECK(empty.empty());
  CHECK(empty.length() == 0);
  CHECK_FALSE(empty.next_hop().has_value());
  CHECK_THROWS(empty.owner());
  CHECK(Route{0}.prepend(1) == Route{1, 0});
}

TEST_CASE("conflicting relationship on one pair is a structural error") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_node(2);
  g.add_edge(1, 2, EdgeKind::P2C);
  // redeclaring the pair with the opposite orientation is caught at
  // construction, before any semantic validation
  CHECK_THROWS_AS(g.add_edge(2, 1, EdgeKind::P2C), std::invalid_argument);
}

TEST_CASE("customer-provider cycle reported with its nodes") {
  AsGraph h;
  h.set_destination(0);
  h.add_node(1);
  h.add_node(2);
  h.add_node(3);
  h.add_edge(0, 1, EdgeKind::Peer);
  h.add_edge(1, 2, EdgeKind::P2C);
  h.add_edge(2, 3, EdgeKind::P2C);
  h.add_edge(3, 1, EdgeKind::P2C);
  auto report = h.validate(Mode::Commercial);
  REQUIRE_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.kind == Violation::Kind::CustomerProviderCycle) {
      found = true;
      CHECK(v.nodes.size() == 3);
    }
  }
  CHECK(found);
  CHECK(testing::has_p2c_cycle_dfs(h));
}

TEST_CASE("star of customers under d validates clean") {
  AsGraph g;
  g.set_destination(0);
  for (NodeId n : {1, 2, 3}) {
    g.add_node(n);
    g.add_edge(n, 0, EdgeKind::P2C);  // n customer of d
  }
  CHECK(g.validate(Mode::Commercial).ok());
  CHECK_FALSE(testing::has_p2c_cycle_dfs(g));
}

TEST_CASE("unlabeled edge flagged in commercial mode only") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_edge(0, 1, EdgeKind::Plain);
  CHECK(g.validate(Mode::ShortestPath).ok());
  auto report = g.validate(Mode::Commercial);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == Violation::Kind::UnlabeledEdgeInCommercial);
}

TEST_CASE("validate is idempotent") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_edge(0, 1, EdgeKind::Plain);
  CHECK(g.validate(Mode::Commercial).to_text() == g.validate(Mode::Commercial).to_text());
}

TEST_CASE("hierarchy depth") {
  SUBCASE("all peers gives zero") {
    AsGraph g;
    g.set_destination(0);
    g.add_node(1);
    g.add_edge(0, 1, EdgeKind::Peer);
    CHECK(g.hierarchy_depth() == 0);
  }
  SUBCASE("chain of customers") {
    AsGraph g;
    g.set_destination(0);
    for (NodeId n : {1, 2, 3}) g.add_node(n);
    g.add_edge(0, 1, EdgeKind::Peer);
    g.add_edge(1, 2, EdgeKind::P2C);
    g.add_edge(2, 3, EdgeKind::P2C);
    CHECK(g.hierarchy_depth() == 2);
    CHECK(testing::longest_p2c_chain(g) == 2);
  }
  SUBCASE("cycle raises") {
    AsGraph g;
    g.set_destination(0);
    g.add_node(1);
    g.add_node(2);
    g.add_node(3);
    g.add_edge(0, 1, EdgeKind::Peer);
    g.add_edge(1, 2, EdgeKind::P2C);
    g.add_edge(2, 3, EdgeKind::P2C);
    g.add_edge(3, 1, EdgeKind::P2C);
    CHECK_THROWS(g.hierarchy_depth());
  }
}

TEST_CASE("depth zero iff no p2c edge, and adding p2c never decreases it") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    AsGraph g;
    g.set_destination(0);
    NodeId n = 3 + static_cast<NodeId>(rng.below(4));
    for (NodeId i = 1; i <= n; ++i) g.add_node(i);
    bool any_p2c = false;
    for (NodeId u = 0; u <= n; ++u) {
      for (NodeId v = u + 1; v <= n; ++v) {
        if (!rng.chance(1, 3)) continue;
        // p2c edges oriented upward by id, so no cycle can form
        if (rng.chance(1, 2)) {
          g.add_edge(u, v, EdgeKind::P2C);
          any_p2c = true;
        } else {
          g.add_edge(u, v, EdgeKind::Peer);
        }
      }
    }
    int x = g.hierarchy_depth();
    CHECK((x == 0) == !any_p2c);
    CHECK(x == testing::longest_p2c_chain(g));
    bool added = false;
    for (NodeId u = 0; u <= n && !added; ++u) {
      for (NodeId v = u + 1; v <= n && !added; ++v) {
        if (g.adjacent(u, v)) continue;
        g.add_edge(u, v, EdgeKind::P2C);
        CHECK(g.hierarchy_depth() >= x);
        added = true;
      }
    }
  }
}

TEST_CASE("neighbor roles are oriented") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_node(2);
  g.add_node(3);
  g.add_edge(1, 2, EdgeKind::P2C);  // 1 customer of 2
  g.add_edge(1, 3, EdgeKind::Peer);
  g.add_edge(1, 0, EdgeKind::Plain);
  CHECK(g.role_of(1, 2) == Role::Provider);
  CHECK(g.role_of(2, 1) == Role::Customer);
  CHECK(g.role_of(1, 3) == Role::Peer);
  CHECK(g.role_of(3, 1) == Role::Peer);
  CHECK(g.role_of(1, 0) == Role::Unlabeled);
  for (const auto& nb : g.neighbors(1)) {
    if (nb.id == 0) CHECK(nb.is_destination);
  }
  CHECK_THROWS(g.role_of(2, 3));
}

TEST_CASE("structure errors") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  CHECK_THROWS(g.add_edge(1, 1, EdgeKind::Plain));
  CHECK_THROWS(g.add_edge(1, 7, EdgeKind::Plain));
  g.add_edge(1, 0, EdgeKind::Plain);
  CHECK_THROWS(g.add_edge(0, 1, EdgeKind::Peer));  // duplicate pair
  CHECK_THROWS(g.add_node(0, true));               // destination as attacker
}

TEST_CASE("topology parser") {
  std::istringstream in(
      "# comment\n"
      "dest 0\n"
      "node 1\n"
      "node 9 attacker\n"
      "edge 1 0 peer\n"
      "edge 9 1 p2c   # 9 customer of 1\n");
  AsGraph g = parse_topology(in);
  CHECK(g.destination() == 0);
  CHECK(g.is_attacker(9));
  CHECK(g.role_of(9, 1) == Role::Provider);
  CHECK(write_topology(g).find("edge 9 1 p2c") != std::string::npos);

  std::istringstream dup("dest 0\nnode 1\nedge 1 0 peer\nedge 0 1 peer\n");
  CHECK_THROWS(parse_topology(dup));
  std::istringstream two_dest("dest 0\ndest 1\n");
  CHECK_THROWS(parse_topology(two_dest));
  std::istringstream unknown("dest 0\nedge 1 0 peer\n");
  CHECK_THROWS(parse_topology(unknown));
  std::istringstream no_dest("node 1\n");
  CHECK_THROWS(parse_topology(no_dest));
}

TEST_CASE("hierarchy generator emits cycle-free layered graphs") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    Scenario sc = random_commercial_instance(5, 2, 1, seed);
    CHECK(sc.graph->validate(Mode::Commercial).ok());
    CHECK_FALSE(testing::has_p2c_cycle_dfs(*sc.graph));
    CHECK(sc.graph->hierarchy_depth() == 4);
    CHECK(testing::longest_p2c_chain(*sc.graph) == 4);
  }
  Scenario big = random_commercial_instance(4, 3, 2, 77);
  CHECK(big.graph->validate(Mode::Commercial).ok());
  CHECK(big.graph->hierarchy_depth() == 3);
}
