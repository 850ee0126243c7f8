#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "attack.hpp"
#include "graph.hpp"
#include "policy.hpp"
#include "types.hpp"

namespace frasim {

// Routes that could ever propagate hop-by-hop to a node, from the
// destination (attacker-free, export-permitted at every hop) or from an
// attacker's fixed announcement (export-permitted on the attacker-free
// prefix, announcement equal to the suffix at the attacker). Materialized
// explicitly, so only desk-scale graphs are supported.
std::vector<Route> perceivable_routes(const AsGraph& graph, const PolicyProfile& profile,
                                      const AttackSet& attacks, NodeId owner);
std::map<NodeId, std::vector<Route>> all_perceivable(const AsGraph& graph,
                                                     const PolicyProfile& profile,
                                                     const AttackSet& attacks);

struct BestPerceivable {
  std::vector<Route> routes;  // the ranking's maxima; empty set => empty route only
  Route best;                 // strict tie-break winner
  std::optional<NodeId> next_hop;
};

// Maxima of a perceivable set under a ranking. Throws if maxima with
// different next hops tie, which signals a ranking violating the tie rule.
BestPerceivable best_perceivable(const std::vector<Route>& prs, const RankingFunction& ranking);

enum class FixPhase { FSR, FCR, FPeeR, FPrvR };

struct FixedEntry {
  Route route;  // empty = fixed to the empty route
  int order = 0;
  FixPhase phase = FixPhase::FSR;
  int predicted_round_bound = 0;
};

struct FixedAssignment {
  std::map<NodeId, FixedEntry> fixed;  // every non-attacker source node
  uint64_t selection_seed = 0;
  int hierarchy_depth = -1;  // commercial only

  const FixedEntry& at(NodeId n) const { return fixed.at(n); }
};

struct OracleResult {
  FixedAssignment assignment;
  // Lemma-witness verification across iterations.
  int witness_checks = 0;
  int witness_failures = 0;
  int walk_overflows = 0;
};

// Iterative fixing for shortest-path systems: repeatedly fix an unfixed node
// whose best perceivable route is shortest with its next hop already fixed,
// then prune every other node's set of routes inconsistent with the fixed
// route or its exports.
OracleResult fsr(const AsGraph& graph, const PolicyProfile& profile, const AttackSet& attacks,
                 uint64_t selection_seed = 0);

// Commercial systems: fix customer routes, then peer routes, then provider
// routes, with per-phase pruning.
OracleResult fr(const AsGraph& graph, const PolicyProfile& profile, const AttackSet& attacks,
                uint64_t selection_seed = 0);

// Lemma witnesses: a node whose most preferred perceivable route is a
// customer (resp. provider) route with its next hop already fixed, found by
// walking candidate routes. `fixed` is replayed to reconstruct the pruned
// sets mid-algorithm. Throws if the walk exceeds |V| steps.
NodeId existence_witness_customer(const AsGraph& graph, const PolicyProfile& profile,
                                  const AttackSet& attacks, const FixedAssignment& fixed);
NodeId existence_witness_provider(const AsGraph& graph, const PolicyProfile& profile,
                                  const AttackSet& attacks, const FixedAssignment& fixed);

}  // namespace frasim
