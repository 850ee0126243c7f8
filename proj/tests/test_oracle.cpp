#include <doctest.h>

#include <algorithm>

#include "bruteforce.hpp"
#include "core/harness.hpp"
#include "core/oracle.hpp"
#include "corpus.hpp"

using namespace frasim;

namespace {

bool contains_route(const std::vector<Route>& set, const Route& r) {
  return std::find(set.begin(), set.end(), r) != set.end();
}

Scenario chain_scenario() {
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  g->add_node(1);
  g->add_node(2);
  g->add_edge(1, 0, EdgeKind::Plain);
  g->add_edge(2, 1, EdgeKind::Plain);
  auto p = std::make_shared<PolicyProfile>(make_shortest_path_profile(*g, 3));
  Scenario sc;
  sc.graph = g;
  sc.profile = p;
  sc.attacks = std::make_shared<AttackSet>();
  sc.oracle_applicable = true;
  return sc;
}

}  // namespace

TEST_CASE("perceivable routes on the chain") {
  Scenario sc = chain_scenario();
  auto pr2 = perceivable_routes(*sc.graph, *sc.profile, *sc.attacks, 2);
  REQUIRE(pr2.size() == 1);
  CHECK(pr2[0] == Route{2, 1, 0});
  auto pr1 = perceivable_routes(*sc.graph, *sc.profile, *sc.attacks, 1);
  REQUIRE(pr1.size() == 1);
  CHECK(pr1[0] == Route{1, 0});
}

TEST_CASE("an attacker's claimed adjacency is perceivable without the edge existing") {
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  g->add_node(1);
  g->add_node(9, true);
  g->add_edge(1, 0, EdgeKind::Plain);
  g->add_edge(1, 9, EdgeKind::Plain);  // 9 has no edge to d
  auto p = std::make_shared<PolicyProfile>(make_shortest_path_profile(*g, 3));
  AttackSet atk;
  atk.add(prefix_hijack(9, *g));
  auto pr1 = perceivable_routes(*g, *p, atk, 1);
  CHECK(contains_route(pr1, Route{1, 9, 0}));
  CHECK(contains_route(pr1, Route{1, 0}));
}

TEST_CASE("export-denied hops exclude routes from the perceivable set") {
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_node(2);
  g.add_edge(1, 0, EdgeKind::Plain);
  g.add_edge(2, 0, EdgeKind::Plain);
  g.add_edge(1, 2, EdgeKind::Plain);
  auto p = make_shortest_path_profile(g, 11);
  p.exports.at(2).add_override({1, false, Route{2, 0}, false});
  AttackSet none;
  auto pr1 = perceivable_routes(g, p, none, 1);
  CHECK_FALSE(contains_route(pr1, Route{1, 2, 0}));
  CHECK(contains_route(pr1, Route{1, 0}));
  // the brute-force filter agrees
  CHECK(pr1 == testing::bruteforce_perceivable(g, p, none, 1));
}

TEST_CASE("perceivable equals the literal filter on the whole corpus sample") {
  auto corpus = testing::perceivable_corpus();
  REQUIRE(corpus.size() == 50);
  int checked = 0;
  for (size_t i = 0; i < corpus.size(); i += 5) {  // subset here; the full pass runs in acceptance
    const Scenario& sc = corpus[i];
    for (NodeId n : sc.graph->source_nodes()) {
      auto got = perceivable_routes(*sc.graph, *sc.profile, *sc.attacks, n);
      auto want = testing::bruteforce_perceivable(*sc.graph, *sc.profile, *sc.attacks, n);
      CHECK_MESSAGE(got == want, "instance ", sc.name, " node ", n);
      checked++;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("best perceivable routes") {
  Scenario sc = chain_scenario();
  auto pr1 = perceivable_routes(*sc.graph, *sc.profile, *sc.attacks, 1);
  auto bp = best_perceivable(pr1, sc.profile->ranking_for(1));
  CHECK(bp.best == Route{1, 0});
  CHECK(bp.next_hop == 0);
  REQUIRE(bp.routes.size() == 1);

  // empty set: the empty route is the only option
  auto none = best_perceivable({}, sc.profile->ranking_for(1));
  CHECK(none.best.empty());
  CHECK_FALSE(none.next_hop.has_value());

  // strict comparator picks a single best among equal-length distinct next hops
  AsGraph g;
  g.set_destination(0);
  g.add_node(1);
  g.add_node(2);
  g.add_node(3);
  g.add_edge(1, 2, EdgeKind::Plain);
  g.add_edge(1, 3, EdgeKind::Plain);
  g.add_edge(2, 0, EdgeKind::Plain);
  g.add_edge(3, 0, EdgeKind::Plain);
  auto p = make_shortest_path_profile(g, 5);
  AttackSet empty;
  auto pr = perceivable_routes(g, p, empty, 1);
  auto best = best_perceivable(pr, p.ranking_for(1));
  CHECK(best.routes.size() == 1);
  CHECK((best.best == Route{1, 2, 0} || best.best == Route{1, 3, 0}));

  // commercial: the customer route wins over the shorter peer route
  AsGraph h;
  h.set_destination(0);
  h.add_node(1);
  h.add_node(2);
  h.add_node(3);
  h.add_edge(2, 1, EdgeKind::P2C);  // 2 customer of 1
  h.add_edge(0, 2, EdgeKind::P2C);  // d customer of 2
  h.add_edge(1, 3, EdgeKind::Peer);
  h.add_edge(0, 3, EdgeKind::P2C);  // d customer of 3
  auto hp = make_commercial_profile(h, 5);
  auto hpr = perceivable_routes(h, hp, empty, 1);
  auto hbest = best_perceivable(hpr, hp.ranking_for(1));
  CHECK(hbest.best == Route{1, 2, 0});  // customer beats peer despite equal length
}

TEST_CASE("fix-shortest-routes on the chain") {
  Scenario sc = chain_scenario();
  OracleResult r = fsr(*sc.graph, *sc.profile, *sc.attacks, 9);
  CHECK(r.assignment.at(1).route == Route{1, 0});
  CHECK(r.assignment.at(2).route == Route{2, 1, 0});
  CHECK(r.assignment.at(1).predicted_round_bound == 1);
  CHECK(r.assignment.at(2).predicted_round_bound == 2);
  CHECK(r.assignment.at(1).order < r.assignment.at(2).order);
}

TEST_CASE("unreachable nodes are fixed to the empty route") {
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  g->add_node(1);
  g->add_node(2);  // no edges at all
  g->add_edge(1, 0, EdgeKind::Plain);
  auto p = std::make_shared<PolicyProfile>(make_shortest_path_profile(*g, 3));
  AttackSet none;
  OracleResult r = fsr(*g, *p, none, 0);
  CHECK(r.assignment.at(2).route.empty());
  CHECK(r.assignment.at(1).route == Route{1, 0});
}

TEST_CASE("gadget with shortest-path rankings substituted settles on direct routes") {
  Scenario sc = bad_gadget_scenario(true);
  // same topology and hijack, but plain shortest-path rankings
  auto profile = std::make_shared<PolicyProfile>(make_shortest_path_profile(*sc.graph, 21, 100));
  OracleResult r = fsr(*sc.graph, *profile, *sc.attacks, 4);
  CHECK(r.assignment.at(1).route == Route{1, 6});
  CHECK(r.assignment.at(2).route == Route{2, 6});
  CHECK(r.assignment.at(3).route == Route{3, 6});
  CHECK(r.assignment.at(5).route == Route{5, 6});
  Route four = r.assignment.at(4).route;
  CHECK((four == Route{4, 5, 6} || four == Route{4, 0, 6}));
}

TEST_CASE("fixing order is non-decreasing in route length for shortest-path systems") {
  for (uint64_t seed : {3ull, 14ull, 159ull}) {
    Scenario sc = random_shortest_path_instance(7, 2, 20, seed);
    OracleResult r = fsr(*sc.graph, *sc.profile, *sc.attacks, seed);
    std::vector<std::pair<int, int>> order_len;
    for (const auto& [n, e] : r.assignment.fixed)
      if (!e.route.empty()) order_len.push_back({e.order, e.route.length()});
    std::sort(order_len.begin(), order_len.end());
    for (size_t i = 1; i < order_len.size(); ++i)
      CHECK(order_len[i - 1].second <= order_len[i].second);
  }
}

TEST_CASE("fix-routes on a pure customer tree") {
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  for (NodeId n : {1, 2, 3, 4}) g->add_node(n);
  g->add_edge(0, 1, EdgeKind::P2C);  // d customer of 1
  g->add_edge(1, 2, EdgeKind::P2C);  // 1 customer of 2
  g->add_edge(1, 3, EdgeKind::P2C);
  g->add_edge(2, 4, EdgeKind::P2C);  // 2 customer of 4
  auto p = std::make_shared<PolicyProfile>(make_commercial_profile(*g, 5));
  AttackSet none;
  OracleResult r = fr(*g, *p, none, 1);
  CHECK(r.assignment.at(1).route == Route{1, 0});
  CHECK(r.assignment.at(2).route == Route{2, 1, 0});
  CHECK(r.assignment.at(3).route == Route{3, 1, 0});
  CHECK(r.assignment.at(4).route == Route{4, 2, 1, 0});
  for (NodeId n : {1, 2, 3, 4}) CHECK(r.assignment.at(n).phase == FixPhase::FCR);
}

TEST_CASE("two stubs sharing a peer edge never route through it") {
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  for (NodeId n : {1, 2, 3}) g->add_node(n);
  g->add_edge(0, 3, EdgeKind::P2C);  // d customer of 3
  g->add_edge(1, 3, EdgeKind::P2C);  // stubs 1,2 customers of 3
  g->add_edge(2, 3, EdgeKind::P2C);
  g->add_edge(1, 2, EdgeKind::Peer);
  auto p = std::make_shared<PolicyProfile>(make_commercial_profile(*g, 13));
  AttackSet none;
  OracleResult r = fr(*g, *p, none, 2);
  CHECK(r.assignment.at(3).route == Route{3, 0});
  CHECK(r.assignment.at(3).phase == FixPhase::FCR);
  CHECK(r.assignment.at(1).route == Route{1, 3, 0});
  CHECK(r.assignment.at(2).route == Route{2, 3, 0});
  CHECK(r.assignment.at(1).phase == FixPhase::FPrvR);

  // brute force: exactly one stable state, and it is the oracle's
  auto stable = testing::enumerate_stable_states(*g, *p, none);
  REQUIRE(stable.size() == 1);
  for (const auto& [n, e] : r.assignment.fixed) CHECK(stable[0].at(n) == e.route);
}

TEST_CASE("victim inside a customer cone falls for the hijack iff it is the best customer route") {
  auto corpus_entry = [&]() {
    auto g = std::make_shared<AsGraph>();
    g->set_destination(0);
    for (NodeId n : {1, 2, 3}) g->add_node(n);
    g->add_node(9, true);
    g->add_edge(0, 1, EdgeKind::P2C);  // d customer of 1
    g->add_edge(2, 1, EdgeKind::P2C);  // 2 customer of 1
    g->add_edge(9, 2, EdgeKind::P2C);  // attacker customer of 2
    g->add_edge(3, 2, EdgeKind::P2C);
    auto p = std::make_shared<PolicyProfile>(make_commercial_profile(*g, 13));
    AttackSet atk;
    atk.add(prefix_hijack(9, *g));
    Scenario sc;
    sc.graph = g;
    sc.profile = p;
    sc.attacks = std::make_shared<AttackSet>(std::move(atk));
    return sc;
  }();
  const Scenario& sc = corpus_entry;
  OracleResult r = fr(*sc.graph, *sc.profile, *sc.attacks, 5);
  // node 2 hears the bogus (9,0) from its customer: a customer route, its best
  CHECK(r.assignment.at(2).route == Route{2, 9, 0});
  auto stable = testing::enumerate_stable_states(*sc.graph, *sc.profile, *sc.attacks);
  REQUIRE(stable.size() == 1);
  for (const auto& [n, e] : r.assignment.fixed) CHECK(stable[0].at(n) == e.route);
}

TEST_CASE("phase classes are monotone: customer, then peer, then provider") {
  for (uint64_t seed : {2ull, 5ull, 31ull, 77ull}) {
    Scenario sc = random_commercial_instance(3, 3, 1, seed);
    OracleResult r = fr(*sc.graph, *sc.profile, *sc.attacks, seed);
    for (const auto& [n, e] : r.assignment.fixed) {
      if (e.route.empty()) continue;
      RouteClass c = classify_route(*sc.graph, e.route);
      switch (e.phase) {
        case FixPhase::FCR:
          CHECK(c == RouteClass::Customer);
          break;
        case FixPhase::FPeeR:
          CHECK(c == RouteClass::Peer);
          break;
        case FixPhase::FPrvR:
          CHECK(c == RouteClass::Provider);
          break;
        case FixPhase::FSR:
          FAIL("fsr phase in commercial output");
      }
    }
    CHECK(r.witness_failures == 0);
    CHECK(r.walk_overflows == 0);
  }
}

TEST_CASE("oracle output does not depend on the selection seed") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    Scenario sp = random_shortest_path_instance(7, 2, 20, seed);
    auto a = fsr(*sp.graph, *sp.profile, *sp.attacks, 100 + seed);
    auto b = fsr(*sp.graph, *sp.profile, *sp.attacks, 900 - seed);
    for (const auto& [n, e] : a.assignment.fixed) CHECK(b.assignment.at(n).route == e.route);

    Scenario cm = random_commercial_instance(3, 2, 1, seed);
    auto c = fr(*cm.graph, *cm.profile, *cm.attacks, 100 + seed);
    auto d = fr(*cm.graph, *cm.profile, *cm.attacks, 900 - seed);
    for (const auto& [n, e] : c.assignment.fixed) CHECK(d.assignment.at(n).route == e.route);
  }
}

TEST_CASE("customer witness walk lands next to the fixed set") {
  // descending chain: d customer of 1, 1 customer of 2, 2 customer of 3
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  for (NodeId n : {1, 2, 3}) g->add_node(n);
  g->add_edge(0, 1, EdgeKind::P2C);
  g->add_edge(1, 2, EdgeKind::P2C);
  g->add_edge(2, 3, EdgeKind::P2C);
  auto p = std::make_shared<PolicyProfile>(make_commercial_profile(*g, 5));
  AttackSet none;
  FixedAssignment nothing_fixed;  // attackers and d only
  NodeId j = existence_witness_customer(*g, *p, none, nothing_fixed);
  CHECK(j == 1);  // the only node whose best next hop is already in the fixed set
}

TEST_CASE("provider witness walk mirrors the customer one") {
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  g->add_node(1);
  g->add_node(2);
  g->add_edge(0, 1, EdgeKind::P2C);  // d customer of 1
  g->add_edge(2, 1, EdgeKind::P2C);  // stub 2 customer of 1
  auto p = std::make_shared<PolicyProfile>(make_commercial_profile(*g, 5));
  AttackSet none;
  // after the customer phase has fixed node 1:
  OracleResult full = fr(*g, *p, none, 3);
  FixedAssignment partial;
  partial.selection_seed = 3;
  for (const auto& [n, e] : full.assignment.fixed)
    if (e.phase == FixPhase::FCR) partial.fixed[n] = e;
  NodeId s = existence_witness_provider(*g, *p, none, partial);
  CHECK(s == 2);
  // no provider-class candidates at all: precondition violation
  FixedAssignment everything = full.assignment;
  CHECK_THROWS_AS(existence_witness_provider(*g, *p, none, everything), std::invalid_argument);
}

TEST_CASE("witness predicates verified across a randomized hierarchy") {
  Scenario sc = random_commercial_instance(4, 3, 1, 0x5ca1e);
  OracleResult r = fr(*sc.graph, *sc.profile, *sc.attacks, 0x5ca1e);
  CHECK(r.witness_checks > 0);
  CHECK(r.witness_failures == 0);
  CHECK(r.walk_overflows == 0);
}

TEST_CASE("oracle scale guard") {
  CHECK_THROWS(random_shortest_path_instance(20, 2, 10, 1));
  Scenario sc = random_shortest_path_instance(6, 1, 10, 1);
  CHECK_NOTHROW(all_perceivable(*sc.graph, *sc.profile, *sc.attacks));
}

TEST_CASE("announcements may name ids outside the graph") {
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  g->add_node(1);
  g->add_node(9, true);
  g->add_edge(1, 0, EdgeKind::Plain);
  g->add_edge(1, 9, EdgeKind::Plain);
  auto p = std::make_shared<PolicyProfile>(make_shortest_path_profile(*g, 3));
  AttackSet atk;
  FixedRouteAttack a(g.get(), 9);
  a.set_announcement(1, Route{9, 42, 77, 0});  // 42 and 77 are no one's ids
  atk.add(std::move(a));

  auto pr1 = perceivable_routes(*g, *p, atk, 1);
  CHECK(contains_route(pr1, Route{1, 9, 42, 77, 0}));
  CHECK(pr1 == testing::bruteforce_perceivable_with_tails(*g, *p, atk, 1));

  // the dynamics carries the same sequence and the oracle predicts it:
  // the real direct route is shorter, so it wins, but the bogus one is the
  // only alternative candidate
  OracleResult r = fsr(*g, *p, atk, 1);
  CHECK(r.assignment.at(1).route == Route{1, 0});
  SimulationState st = initialize(*g, *p, atk);
  FairRandomSchedule sched(8);
  Trace tr = run(st, sched, {});
  CHECK(tr.final_selections.at(1) == Route{1, 0});
  CHECK(st.nodes.at(1).rib_in.at(9) == Route{9, 42, 77, 0});
}

TEST_CASE("pruned routes never win: simulated finals always sit in the pruned sets") {
  for (uint64_t seed : {11ull, 12ull}) {
    Scenario sc = random_shortest_path_instance(6, 1, 20, seed);
    OracleResult r = fsr(*sc.graph, *sc.profile, *sc.attacks, seed);
    InitialConfig init;
    SimulationState st = initialize(*sc.graph, *sc.profile, *sc.attacks, init);
    FairRandomSchedule sched(seed);
    Trace tr = run(st, sched, {});
    REQUIRE(tr.quiescent);
    for (const auto& [n, e] : r.assignment.fixed) {
      CHECK(tr.final_selections.at(n) == e.route);
      if (!e.route.empty()) {
        auto pr = perceivable_routes(*sc.graph, *sc.profile, *sc.attacks, n);
        CHECK(std::find(pr.begin(), pr.end(), e.route) != pr.end());
      }
    }
  }
}
