#pragma once

#include <memory>
#include <string>
#include <vector>

#include "attack.hpp"
#include "engine.hpp"
#include "graph.hpp"
#include "oracle.hpp"
#include "policy.hpp"
#include "types.hpp"

namespace frasim {

// A runnable instance: topology, policies and attacks with a machine-checkable
// expectation. Heap-held graph so profile/attack back-pointers stay valid.
struct Scenario {
  std::shared_ptr<const AsGraph> graph;
  std::shared_ptr<const PolicyProfile> profile;
  std::shared_ptr<const AttackSet> attacks;
  std::string name;
  int expected_round_bound = 0;  // 0 = no bound expectation
  bool expect_oscillation = false;
  bool oracle_applicable = false;  // FSR/FR defined for this profile
};

// The 7-node instance behind the destabilization example: nodes 1..3 prefer
// the two-step detour routes through node 0 that only a hijack can make
// appear; 4,5 form the long physical tail to the destination (id 6).
Scenario bad_gadget_scenario(bool post_attack = true, uint64_t tie_seed = 1);

// Connected random graph, shortest-path rankings, seeded export subsets,
// mixed random attacks (hijack / fabricated path / silence). n counts source
// nodes including attackers; the destination is extra.
Scenario random_shortest_path_instance(int n, int attacker_count, int density_pct, uint64_t seed);

enum class DestAttachment { CustomerOfTop, PeerOfTop };

// Layered customer-provider hierarchy with intra-level peer links; the
// destination sits beside the top level, attached as its customer or peer.
// levels=L yields hierarchy depth L-1, except customer-attach keeps depth
// at least 1.
Scenario random_commercial_instance(int levels, int width, int attacker_count, uint64_t seed,
                                    DestAttachment attach = DestAttachment::CustomerOfTop);

// flavor 0 = canonical all-empty; otherwise seeded bogus selections and
// believed announcements. Beliefs on a silenced attacker edge stay honest
// (silence never corrects them, so junk there would model a different attack).
InitialConfig random_initial_config(const AsGraph& graph, const AttackSet& attacks, uint64_t seed,
                                    int flavor);

struct CellChecks {
  bool quiescent = false;
  bool bound_ok = false;
  bool oracle_match = false;
  bool per_node_bounds_ok = false;
  bool determinism_ok = false;
  bool attacker_constancy_ok = false;
  bool selections_simple_ok = false;
  bool probe_ok = false;
  bool witnesses_ok = false;
  bool oracle_seed_independent = false;
  int stabilization_round = 0;
  int rounds_completed = 0;
  int bound = 0;
  uint64_t events = 0;
  uint64_t trace_hash = 0;
  bool ok() const {
    return quiescent && bound_ok && oracle_match && per_node_bounds_ok && determinism_ok &&
           attacker_constancy_ok && selections_simple_ok && probe_ok && witnesses_ok &&
           oracle_seed_independent;
  }
};

// One simulation run with every model check applied: convergence, round
// bound, oracle equality and per-node bounds, double-run determinism,
// attacker constancy, selection simplicity, and a 1000-event quiescence probe.
CellChecks run_cell(const Scenario& scenario, const OracleResult* oracle,
                    const InitialConfig& init, uint64_t schedule_seed, int round_bound);

enum class SweepKind { ShortestPath, Commercial };

struct CellRecord {
  SweepKind kind = SweepKind::ShortestPath;
  int size_param = 0;  // source count, or hierarchy depth x
  int attacker_count = 0;
  uint64_t instance_seed = 0;
  int config = 0;
  CellChecks checks;
  std::string note;
};

struct SweepReport {
  std::vector<CellRecord> cells;
  int failures = 0;
  double wall_ms = 0;
  int witness_checks = 0;
  bool all_ok() const { return failures == 0; }
  std::string to_text() const;
  std::string to_ndjson() const;
};

struct SweepOptions {
  uint64_t base_seed = 0x5eed;
  int seeds = 100;
  int configs = 3;
  int jobs = 0;  // 0 = hardware concurrency
};

// Round-bound and oracle-agreement sweeps: shortest-path instances are held
// to an n-round bound (n source nodes), commercial instances to 2x+1 rounds
// for hierarchy depth x.
SweepReport shortest_path_sweep(const SweepOptions& options,
                                std::vector<int> sizes = {3, 4, 5, 6, 7, 8, 9, 10},
                                std::vector<int> attacker_counts = {0, 1, 2, 3});
SweepReport commercial_sweep(const SweepOptions& options, std::vector<int> depths = {0, 1, 2, 3, 4},
                             std::vector<int> attacker_counts = {0, 1, 2});

// Experiment runner for a single scenario across many (seed, config) cells.
SweepReport run_experiment(const Scenario& scenario, const std::vector<uint64_t>& schedule_seeds,
                           int configs, int round_bound);

struct GadgetReport {
  int pre_runs = 0;
  int pre_failures = 0;
  bool post_oscillates = false;
  size_t cycle_configurations = 0;
  std::set<NodeId> changing_nodes;
  bool ok() const;
  std::string to_text() const;
};

// Pre-attack stability across fair seeds, then the crafted deterministic
// schedule on the hijacked variant, expecting an oscillation witness.
GadgetReport gadget_check(int seeds = 100);

}  // namespace frasim
