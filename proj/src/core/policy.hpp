#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "graph.hpp"
#include "types.hpp"

namespace frasim {

// Class of a route from its owner's point of view, per the first edge.
enum class RouteClass { Customer, Peer, Provider, SelfDestination, Unknown };

enum class Cmp { ABetter, BBetter, Tied };

// Class of `route` as ranked/exported by its owner. The second hop decides;
// a next hop that is not an actual neighbor gives Unknown (bogus content),
// unless `learned_from` names the edge the announcement arrived on.
RouteClass classify_route(const AsGraph& graph, const Route& route,
                          std::optional<NodeId> learned_from = std::nullopt);
// Strict variant: throws on a route whose second hop is not adjacent to the
// owner instead of falling back.
RouteClass classify_route_strict(const AsGraph& graph, const Route& route);

// Ranking over all node sequences owned by one node (including sequences
// that do not exist in the graph) plus the empty route, which is always
// worst. Ties in the preorder occur only between routes sharing a next hop;
// a seeded tie-break then yields a strict selection order.
class RankingFunction {
 public:
  enum class Flavor { ShortestPath, Commercial };
  enum class IntraClassOrder { PreferShorter, SeededArbitrary };
  enum class PeerPreference { PeerOverProvider, ProviderOverPeer };

  RankingFunction() = default;
  RankingFunction(const AsGraph* graph, NodeId owner, Flavor flavor, uint64_t tie_seed,
                  IntraClassOrder intra = IntraClassOrder::PreferShorter,
                  PeerPreference peer_pref = PeerPreference::PeerOverProvider);

  NodeId owner() const { return owner_; }

  // Explicit override: `ordered` ranks strictly above every other route,
  // best first. Used by hand-built scenarios.
  void pin_order(std::vector<Route> ordered) { pinned_ = std::move(ordered); }
  const std::vector<Route>& pinned() const { return pinned_; }

  // Preorder comparison; Tied only for equal routes or equal-key routes
  // sharing the same next hop.
  Cmp compare(const Route& a, const Route& b,
              std::optional<NodeId> learned_a = std::nullopt,
              std::optional<NodeId> learned_b = std::nullopt) const;
  // Strict selection order: preorder, then seeded tie-break.
  bool strictly_better(const Route& a, const Route& b,
                       std::optional<NodeId> learned_a = std::nullopt,
                       std::optional<NodeId> learned_b = std::nullopt) const;

 private:
  struct Key {
    long pin;       // index in pinned list, LONG_MAX when unlisted
    int tier;       // route-class tier (commercial), 0 otherwise
    long intra;     // length or 0
    uint64_t nh;    // seeded next-hop rank
  };
  Key key(const Route& r, std::optional<NodeId> learned_from) const;
  uint64_t tie_hash(const Route& r) const;

  const AsGraph* graph_ = nullptr;
  NodeId owner_ = 0;
  Flavor flavor_ = Flavor::ShortestPath;
  IntraClassOrder intra_ = IntraClassOrder::PreferShorter;
  PeerPreference peer_pref_ = PeerPreference::PeerOverProvider;
  uint64_t tie_seed_ = 0;
  std::map<NodeId, uint64_t> nh_rank_;  // seeded permutation over real neighbors
  std::vector<Route> pinned_;
};

// Comparison with ownership checks: both routes must belong to the ranking's
// node (or be empty).
Cmp rank_compare(const RankingFunction& ranking, const Route& a, const Route& b);

// Which routes a node is willing to announce to each neighbor. The empty
// route is always permitted.
class ExportPolicy {
 public:
  enum class Base { AllowAll, SeededSubset, Commercial };

  ExportPolicy() = default;
  ExportPolicy(const AsGraph* graph, NodeId owner, Base base, uint64_t seed = 0,
               uint32_t allow_pct = 100);

  NodeId owner() const { return owner_; }

  struct OverrideRule {
    NodeId neighbor;
    bool all = false;  // applies to every route
    Route route;
    bool allow = true;
  };
  void add_override(OverrideRule rule) { overrides_.push_back(std::move(rule)); }

  bool permit(NodeId neighbor, const Route& route) const;

 private:
  const AsGraph* graph_ = nullptr;
  NodeId owner_ = 0;
  Base base_ = Base::AllowAll;
  uint64_t seed_ = 0;
  uint32_t allow_pct_ = 100;
  std::vector<OverrideRule> overrides_;
};

enum class ProfileMode { ShortestPath, Commercial, Custom };

// One ranking function and one export policy per non-attacker source node.
// Immutable after construction; comparators are pure.
struct PolicyProfile {
  ProfileMode mode = ProfileMode::ShortestPath;
  const AsGraph* graph = nullptr;
  std::map<NodeId, RankingFunction> rankings;
  std::map<NodeId, ExportPolicy> exports;

  const RankingFunction& ranking_for(NodeId node) const;
  const ExportPolicy& export_for(NodeId node) const;
  // Announcement acceptance into candidates is loop-checked by the engine;
  // export permission toward a neighbor, with d and attackers special-cased
  // (d always exports its self-route, attackers are constant announcers).
  bool permits(NodeId sender, NodeId receiver, const Route& route) const;
};

PolicyProfile make_shortest_path_profile(const AsGraph& graph, uint64_t tie_seed,
                                         uint32_t export_allow_pct = 100);

PolicyProfile make_commercial_profile(
    const AsGraph& graph, uint64_t tie_seed,
    RankingFunction::IntraClassOrder intra = RankingFunction::IntraClassOrder::PreferShorter,
    RankingFunction::PeerPreference peer_pref = RankingFunction::PeerPreference::PeerOverProvider);

}  // namespace frasim
