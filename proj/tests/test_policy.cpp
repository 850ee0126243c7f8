#include <doctest.h>

#include "bruteforce.hpp"
#include "core/harness.hpp"
#include "core/policy.hpp"

using namespace frasim;

namespace {

AsGraph small_plain() {
  AsGraph g;
  g.set_destination(0);
  for (NodeId n : {1, 2, 3}) g.add_node(n);
  g.add_edge(1, 0, EdgeKind::Plain);
  g.add_edge(2, 0, EdgeKind::Plain);
  g.add_edge(3, 0, EdgeKind::Plain);
  g.add_edge(1, 2, EdgeKind::Plain);
  g.add_edge(1, 3, EdgeKind::Plain);
  return g;
}

AsGraph small_commercial() {
  AsGraph g;
  g.set_destination(0);
  for (NodeId n : {1, 2, 3, 4}) g.add_node(n);
  g.add_edge(0, 1, EdgeKind::P2C);  // d customer of 1
  g.add_edge(2, 1, EdgeKind::P2C);  // 2 customer of 1
  g.add_edge(4, 2, EdgeKind::P2C);  // 4 customer of 2
  g.add_edge(2, 3, EdgeKind::Peer);
  g.add_edge(3, 1, EdgeKind::P2C);  // 3 customer of 1
  return g;
}

}  // namespace

TEST_CASE("shortest-path ranking prefers shorter routes") {
  AsGraph g = small_plain();
  auto p = make_shortest_path_profile(g, 42);
  const auto& rank = p.ranking_for(1);
  CHECK(rank_compare(rank, Route{1, 0}, Route{1, 2, 0}) == Cmp::ABetter);
  CHECK(rank_compare(rank, Route{1, 2, 0}, Route{1, 0}) == Cmp::BBetter);
  CHECK(rank_compare(rank, Route{1, 0}, Route{1, 0}) == Cmp::Tied);
  // empty route is worst and comparable
  CHECK(rank_compare(rank, Route{1, 0}, Route{}) == Cmp::ABetter);
  CHECK(rank_compare(rank, Route{}, Route{}) == Cmp::Tied);
  // nonexistent sequences rank fine too
  CHECK(rank_compare(rank, Route{1, 3, 0}, Route{1, 3, 2, 0}) == Cmp::ABetter);
  CHECK_THROWS(rank_compare(rank, Route{2, 0}, Route{1, 0}));
}

TEST_CASE("commercial ranking puts any customer route above peer and provider routes") {
  AsGraph g = small_commercial();
  auto p = make_commercial_profile(g, 7);
  // node 2: customer 4, peer 3, provider 1
  const auto& rank = p.ranking_for(2);
  Route long_customer{2, 4, 3, 1, 0};  // length 4, classified by first hop only
  Route short_provider{2, 1, 0};
  Route peer_route{2, 3, 1, 0};
  CHECK(rank_compare(rank, long_customer, short_provider) == Cmp::ABetter);
  CHECK(rank_compare(rank, long_customer, peer_route) == Cmp::ABetter);
  CHECK(rank.strictly_better(long_customer, short_provider));
}

TEST_CASE("peer versus provider tier is configurable") {
  AsGraph g = small_commercial();
  Route peer_route{2, 3, 1, 0};
  Route provider_route{2, 1, 0};
  auto peer_first = make_commercial_profile(g, 7, RankingFunction::IntraClassOrder::PreferShorter,
                                            RankingFunction::PeerPreference::PeerOverProvider);
  CHECK(peer_first.ranking_for(2).compare(peer_route, provider_route) == Cmp::ABetter);
  auto provider_first =
      make_commercial_profile(g, 7, RankingFunction::IntraClassOrder::PreferShorter,
                              RankingFunction::PeerPreference::ProviderOverPeer);
  CHECK(provider_first.ranking_for(2).compare(peer_route, provider_route) == Cmp::BBetter);
}

TEST_CASE("preorder ties occur only between routes sharing a next hop") {
  // exhaustive over all simple sequences on small graphs, both profiles
  for (int variant = 0; variant < 2; ++variant) {
    AsGraph g = variant == 0 ? small_plain() : small_commercial();
    PolicyProfile p = variant == 0 ? make_shortest_path_profile(g, 1234)
                                   : make_commercial_profile(
                                         g, 1234, RankingFunction::IntraClassOrder::SeededArbitrary);
    for (NodeId n : g.source_nodes()) {
      const auto& rank = p.ranking_for(n);
      auto seqs = testing::all_simple_sequences(g, n);
      for (const auto& a : seqs) {
        for (const auto& b : seqs) {
          if (rank.compare(a, b) == Cmp::Tied && !(a == b)) CHECK(a.hops[1] == b.hops[1]);
          // strict order is antisymmetric and total
          if (!(a == b)) CHECK(rank.strictly_better(a, b) != rank.strictly_better(b, a));
        }
      }
      // transitivity of the strict order, sampled
      for (size_t i = 0; i + 2 < seqs.size(); i += 3) {
        const auto &a = seqs[i], &b = seqs[i + 1], &c = seqs[i + 2];
        if (rank.strictly_better(a, b) && rank.strictly_better(b, c))
          CHECK(rank.strictly_better(a, c));
      }
    }
  }
}

TEST_CASE("shortest-path comparisons: unequal lengths always resolve by length") {
  AsGraph g = small_plain();
  auto p = make_shortest_path_profile(g, 99);
  for (NodeId n : g.source_nodes()) {
    const auto& rank = p.ranking_for(n);
    auto seqs = testing::all_simple_sequences(g, n);
    for (const auto& a : seqs)
      for (const auto& b : seqs)
        if (a.length() < b.length()) CHECK(rank.compare(a, b) == Cmp::ABetter);
  }
}

TEST_CASE("profiles are deterministic per seed") {
  AsGraph g = small_plain();
  auto p1 = make_shortest_path_profile(g, 5, 70);
  auto p2 = make_shortest_path_profile(g, 5, 70);
  Route a{1, 2, 0}, b{1, 3, 0};
  CHECK(p1.ranking_for(1).strictly_better(a, b) == p2.ranking_for(1).strictly_better(a, b));
  for (NodeId n : g.source_nodes()) {
    for (const auto& r : testing::all_simple_sequences(g, n)) {
      for (const auto& nb : g.neighbors(n)) {
        CHECK(p1.export_for(n).permit(nb.id, r) == p2.export_for(n).permit(nb.id, r));
      }
    }
  }
}

TEST_CASE("empty route always exportable, export-all permits everything") {
  AsGraph g = small_plain();
  auto all = make_shortest_path_profile(g, 3, 100);
  auto sub = make_shortest_path_profile(g, 3, 50);
  for (NodeId n : g.source_nodes()) {
    for (const auto& nb : g.neighbors(n)) {
      CHECK(all.export_for(n).permit(nb.id, Route{}));
      CHECK(sub.export_for(n).permit(nb.id, Route{}));
      CHECK(all.export_for(n).permit(nb.id, Route{n, 2, 3, 0}));
    }
  }
}

TEST_CASE("commercial exports: peer and provider routes go to customers only") {
  AsGraph g = small_commercial();
  auto p = make_commercial_profile(g, 7);
  // node 2 has provider 1, peer 3, customer 4
  const auto& exp = p.export_for(2);
  Route provider_route{2, 1, 0};
  Route peer_route{2, 3, 1, 0};
  Route customer_route{2, 4, 3, 1, 0};
  CHECK(exp.permit(4, provider_route));  // toward customer: anything
  CHECK(exp.permit(4, peer_route));
  CHECK(exp.permit(4, customer_route));
  CHECK_FALSE(exp.permit(3, provider_route));  // toward peer: customer routes only
  CHECK_FALSE(exp.permit(1, provider_route));  // toward provider: same
  CHECK_FALSE(exp.permit(3, peer_route));
  CHECK(exp.permit(3, customer_route));
  CHECK(exp.permit(1, customer_route));
}

TEST_CASE("classify_route: class comes from the second hop") {
  AsGraph g = small_commercial();
  CHECK(classify_route(g, Route{2, 4, 0}) == RouteClass::Customer);
  CHECK(classify_route(g, Route{2, 1, 0}) == RouteClass::Provider);
  CHECK(classify_route(g, Route{2, 3, 0}) == RouteClass::Peer);
  // one-hop route classified by the edge label
  CHECK(classify_route(g, Route{1, 0}) == RouteClass::Customer);  // d is 1's customer
  // second hop not adjacent: strict variant throws, lenient falls back
  CHECK_THROWS(classify_route_strict(g, Route{2, 0}));
  CHECK(classify_route(g, Route{2, 0}) == RouteClass::Unknown);
  CHECK(classify_route(g, Route{2, 0}, 3) == RouteClass::Peer);  // learned over the peer edge
}

TEST_CASE("one-hop route over a peer edge is a peer route") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_edge(1, 0, EdgeKind::Peer);
  CHECK(classify_route(g, Route{1, 0}) == RouteClass::Peer);
}

TEST_CASE("plain edge toward d counts as customer in mixed graphs") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_node(2);
  g.add_edge(1, 0, EdgeKind::Plain);
  g.add_edge(1, 2, EdgeKind::Peer);
  CHECK(classify_route(g, Route{1, 0}) == RouteClass::Customer);
}

TEST_CASE("commercial profile rejects unlabeled edges") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_edge(1, 0, EdgeKind::Plain);
  CHECK_THROWS(make_commercial_profile(g, 1));
}

TEST_CASE("pinned rankings sit above everything else in the given order") {
  AsGraph g = small_plain();
  auto p = make_shortest_path_profile(g, 42);
  p.rankings.at(1).pin_order({Route{1, 3, 2, 0}, Route{1, 2, 0}});
  const auto& rank = p.ranking_for(1);
  CHECK(rank.strictly_better(Route{1, 3, 2, 0}, Route{1, 2, 0}));
  CHECK(rank.strictly_better(Route{1, 2, 0}, Route{1, 0}));  // pinned beats unlisted shorter
  CHECK(rank.strictly_better(Route{1, 0}, Route{1, 3, 0}));  // unlisted fall back to length
}
