#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace frasim {

namespace {

std::vector<NodeId> pick_distinct(SplitMix64& rng, std::vector<NodeId> pool, size_t count) {
  std::vector<NodeId> out;
  count = std::min(count, pool.size());
  for (size_t i = 0; i < count; ++i) {
    size_t k = rng.below(pool.size());
    out.push_back(pool[k]);
    pool.erase(pool.begin() + k);
  }
  return out;
}

// Mixed fixed-route attacks: hijack, fabricated path, silence. Bodies start
// with the attacker itself and never name another attacker, the exact shape
// the perceivable-route conditions cover.
void random_attacks(AttackSet& set, const AsGraph& g, SplitMix64& rng) {
  std::vector<NodeId> body_pool;
  for (NodeId n : g.source_nodes()) body_pool.push_back(n);
  for (NodeId a : g.attackers()) {
    FixedRouteAttack atk(&g, a);
    for (const auto& nb : g.neighbors(a)) {
      uint64_t roll = rng.below(100);
      if (roll < 45) {
        atk.set_announcement(nb.id, Route{a, g.destination()});
      } else if (roll < 75) {
        std::vector<NodeId> hops{a};
        size_t body_len = 1 + rng.below(3);
        std::vector<NodeId> pool = body_pool;
        pool.erase(std::remove(pool.begin(), pool.end(), a), pool.end());
        for (NodeId mid : pick_distinct(rng, pool, body_len)) hops.push_back(mid);
        hops.push_back(g.destination());
        atk.set_announcement(nb.id, Route(std::move(hops)));
      } else {
        atk.set_silence(nb.id);
      }
    }
    set.add(std::move(atk));
  }
}

}  // namespace

Scenario bad_gadget_scenario(bool post_attack, uint64_t tie_seed) {
  auto g = std::make_shared<AsGraph>();
  g->set_destination(6);
  for (NodeId n : {0, 1, 2, 3, 4, 5}) g->add_node(n, post_attack && n == 0);
  const std::pair<NodeId, NodeId> es[] = {{1, 6}, {2, 6}, {3, 6}, {0, 1}, {0, 2}, {0, 3},
                                          {1, 3}, {2, 1}, {3, 2}, {0, 4}, {4, 5}, {5, 6}};
  for (auto [u, v] : es) g->add_edge(u, v, EdgeKind::Plain);

  auto profile = std::make_shared<PolicyProfile>(make_shortest_path_profile(*g, tie_seed, 100));
  profile->rankings.at(1).pin_order({Route{1, 3, 0, 6}, Route{1, 0, 6}, Route{1, 6}});
  profile->rankings.at(2).pin_order({Route{2, 1, 0, 6}, Route{2, 0, 6}, Route{2, 6}});
  profile->rankings.at(3).pin_order({Route{3, 2, 0, 6}, Route{3, 0, 6}, Route{3, 6}});
  profile->mode = ProfileMode::Custom;

  auto attacks = std::make_shared<AttackSet>();
  if (post_attack) attacks->add(prefix_hijack(0, *g));

  Scenario sc;
  sc.graph = g;
  sc.profile = profile;
  sc.attacks = attacks;
  sc.name = post_attack ? "bad_gadget_post" : "bad_gadget_pre";
  sc.expect_oscillation = post_attack;
  return sc;
}

Scenario random_shortest_path_instance(int n, int attacker_count, int density_pct, uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one source node");
  if (n + 1 > 16)
    throw std::invalid_argument("instance too large for oracle materialization");
  SplitMix64 rng(mix64(seed ^ 0x517e57));
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);
  attacker_count = std::min(attacker_count, n - 1);  // keep at least one honest source
  std::vector<NodeId> sources;
  for (NodeId i = 1; i <= n; ++i) sources.push_back(i);
  std::vector<NodeId> chosen = pick_distinct(rng, sources, attacker_count);
  for (NodeId i = 1; i <= n; ++i)
    g->add_node(i, std::find(chosen.begin(), chosen.end(), i) != chosen.end());

  // Random spanning tree keeps it connected, then extra edges per density.
  std::vector<NodeId> order;
  for (NodeId i = 0; i <= n; ++i) order.push_back(i);
  for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  for (size_t i = 1; i < order.size(); ++i)
    g->add_edge(order[i], order[rng.below(i)], EdgeKind::Plain);
  for (NodeId u = 0; u <= n; ++u)
    for (NodeId v = u + 1; v <= n; ++v)
      if (!g->adjacent(u, v) && rng.below(100) < static_cast<uint64_t>(density_pct))
        g->add_edge(u, v, EdgeKind::Plain);

  uint32_t export_pct[] = {100, 80, 65};
  auto profile = std::make_shared<PolicyProfile>(
      make_shortest_path_profile(*g, mix64(seed ^ 0x71e5), export_pct[rng.below(3)]));

  auto attacks = std::make_shared<AttackSet>();
  random_attacks(*attacks, *g, rng);

  Scenario sc;
  sc.graph = g;
  sc.profile = profile;
  sc.attacks = attacks;
  sc.name = "sp_n" + std::to_string(n) + "_a" + std::to_string(attacker_count);
  sc.expected_round_bound = n;
  sc.oracle_applicable = true;
  return sc;
}

Scenario random_commercial_instance(int levels, int width, int attacker_count, uint64_t seed,
                                    DestAttachment attach) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  // Oracle materialization has its own scale guard; the generator itself
  // also serves plain validation tests at larger sizes.
  width = std::max(1, std::min(width, 64 / levels));
  SplitMix64 rng(mix64(seed ^ 0xc033c1a1));
  auto g = std::make_shared<AsGraph>();
  g->set_destination(0);

  std::vector<std::vector<NodeId>> level_nodes(levels);
  NodeId next_id = 1;
  for (int l = 0; l < levels; ++l)
    for (int k = 0; k < width; ++k) level_nodes[l].push_back(next_id++);

  std::vector<NodeId> sources;
  for (const auto& lv : level_nodes) sources.insert(sources.end(), lv.begin(), lv.end());
  std::vector<NodeId> chosen = pick_distinct(rng, sources, std::min<size_t>(attacker_count, sources.size() - 1));
  for (NodeId s : sources)
    g->add_node(s, std::find(chosen.begin(), chosen.end(), s) != chosen.end());

  // p2c edges between adjacent levels only; a spine guarantees the depth.
  for (int l = 0; l + 1 < levels; ++l) {
    g->add_edge(level_nodes[l][0], level_nodes[l + 1][0], EdgeKind::P2C);
    for (NodeId c : level_nodes[l]) {
      for (NodeId p : level_nodes[l + 1]) {
        if (g->adjacent(c, p)) continue;
        if (rng.chance(1, 2)) g->add_edge(c, p, EdgeKind::P2C);
      }
      // everyone needs at least one provider to stay attached
      if (![&] {
            for (const auto& nb : g->neighbors(c))
              if (nb.role == Role::Provider) return true;
            return false;
          }())
        g->add_edge(c, level_nodes[l + 1][rng.below(level_nodes[l + 1].size())], EdgeKind::P2C);
    }
  }
  // peer edges within levels
  for (const auto& lv : level_nodes)
    for (size_t i = 0; i < lv.size(); ++i)
      for (size_t j = i + 1; j < lv.size(); ++j)
        if (rng.chance(2, 5)) g->add_edge(lv[i], lv[j], EdgeKind::Peer);

  const auto& top = level_nodes[levels - 1];
  size_t d_links = 1 + rng.below(std::min<size_t>(2, top.size()));
  for (NodeId t : pick_distinct(rng, top, d_links)) {
    if (attach == DestAttachment::CustomerOfTop)
      g->add_edge(0, t, EdgeKind::P2C);  // d is the customer
    else
      g->add_edge(0, t, EdgeKind::Peer);
  }

  auto intra = rng.chance(1, 2) ? RankingFunction::IntraClassOrder::PreferShorter
                                : RankingFunction::IntraClassOrder::SeededArbitrary;
  auto peer_pref = rng.chance(1, 2) ? RankingFunction::PeerPreference::PeerOverProvider
                                    : RankingFunction::PeerPreference::ProviderOverPeer;
  auto profile = std::make_shared<PolicyProfile>(
      make_commercial_profile(*g, mix64(seed ^ 0xc0ffee), intra, peer_pref));

  auto attacks = std::make_shared<AttackSet>();
  random_attacks(*attacks, *g, rng);

  Scenario sc;
  sc.graph = g;
  sc.profile = profile;
  sc.attacks = attacks;
  int x = g->hierarchy_depth();
  sc.name = "comm_x" + std::to_string(x) + "_a" + std::to_string(chosen.size());
  sc.expected_round_bound = 2 * x + 1;
  sc.oracle_applicable = true;
  return sc;
}

InitialConfig random_initial_config(const AsGraph& g, const AttackSet& attacks, uint64_t seed,
                                    int flavor) {
  InitialConfig init;
  if (flavor == 0) return init;
  SplitMix64 rng(mix64(seed ^ (0x1817 + flavor)));
  std::vector<NodeId> sources = g.source_nodes();
  auto random_tail = [&](NodeId first) {
    std::vector<NodeId> hops{first};
    size_t extra = rng.below(3);
    std::vector<NodeId> pool = sources;
    pool.erase(std::remove(pool.begin(), pool.end(), first), pool.end());
    for (NodeId mid : pick_distinct(rng, pool, extra)) hops.push_back(mid);
    hops.push_back(g.destination());
    return Route(std::move(hops));
  };
  for (NodeId n : sources) {
    if (rng.chance(1, 2)) init.selections[n] = random_tail(n);
    for (const auto& nb : g.neighbors(n)) {
      if (!rng.chance(2, 3)) continue;
      if (g.is_attacker(nb.id)) {
        const FixedRouteAttack* atk = attacks.find(nb.id);
        auto ann = atk ? atk->announcement_for(n) : std::nullopt;
        if (ann && rng.chance(1, 2)) init.rib[n][nb.id] = *ann;
        continue;  // silence edges keep the canonical empty belief
      }
      if (g.is_destination(nb.id)) {
        if (rng.chance(1, 2)) init.rib[n][nb.id] = Route{g.destination()};
        continue;
      }
      init.rib[n][nb.id] = random_tail(nb.id);
    }
  }
  return init;
}

CellChecks run_cell(const Scenario& scenario, const OracleResult* oracle,
                    const InitialConfig& init, uint64_t schedule_seed, int round_bound) {
  CellChecks checks;
  checks.bound = round_bound;

  RunOptions opts;
  opts.events_max = 200000;
  opts.quiescence_check_stride = 2;

  SimulationState state = initialize(*scenario.graph, *scenario.profile, *scenario.attacks, init);
  FairRandomSchedule schedule(schedule_seed);
  Trace trace = run(state, schedule, opts);

  checks.quiescent = trace.stop == StopReason::Quiescent;
  checks.stabilization_round = trace.stabilization_round;
  checks.rounds_completed = trace.rounds_completed;
  checks.events = trace.events;
  checks.trace_hash = trace.trace_hash;
  checks.bound_ok = round_bound == 0 || trace.stabilization_round <= round_bound;
  checks.attacker_constancy_ok = state.attacker_constancy_ok;

  checks.selections_simple_ok = true;
  for (const auto& [n, r] : trace.final_selections) {
    if (!r.is_simple() || (!r.empty() && r.owner() != n)) checks.selections_simple_ok = false;
  }

  if (oracle) {
    checks.oracle_match = true;
    checks.per_node_bounds_ok = true;
    for (const auto& [n, e] : oracle->assignment.fixed) {
      if (trace.final_selections.at(n) != e.route) checks.oracle_match = false;
      if (trace.last_change_round.at(n) > e.predicted_round_bound)
        checks.per_node_bounds_ok = false;
    }
    checks.witnesses_ok = oracle->witness_failures == 0 && oracle->walk_overflows == 0;
  } else {
    checks.oracle_match = checks.per_node_bounds_ok = checks.witnesses_ok = true;
  }
  checks.oracle_seed_independent = true;  // owned by the sweep, which compares seeds

  // Double run: identical inputs give a bit-identical trace.
  {
    SimulationState state2 =
        initialize(*scenario.graph, *scenario.profile, *scenario.attacks, init);
    FairRandomSchedule schedule2(schedule_seed);
    Trace trace2 = run(state2, schedule2, opts);
    checks.determinism_ok = trace2.trace_hash == trace.trace_hash &&
                            trace2.final_selections == trace.final_selections;
  }

  // Quiescence safety: a thousand further fair events change nothing.
  if (checks.quiescent) {
    SimulationState probe = state;
    size_t changes_before = probe.changes.size();
    FairRandomSchedule probe_schedule(mix64(schedule_seed ^ 0x9a9a));
    RunOptions probe_opts;
    probe_opts.events_max = 1000;
    probe_opts.stop_on_quiescence = false;
    run(probe, probe_schedule, probe_opts);
    checks.probe_ok = probe.changes.size() == changes_before;
  }
  return checks;
}

namespace {

struct CellSpec {
  SweepKind kind;
  int size_param;
  int attacker_count;
  uint64_t instance_seed;
};

SweepReport run_sweep(SweepKind kind, const std::vector<int>& sizes,
                      const std::vector<int>& attacker_counts, const SweepOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  uint64_t kind_tag = kind == SweepKind::ShortestPath ? 1 : 2;
  std::vector<CellSpec> specs;
  for (int size : sizes)
    for (int ac : attacker_counts)
      for (int s = 0; s < options.seeds; ++s)
        specs.push_back({kind, size, ac,
                         mix64(options.base_seed ^ (kind_tag << 40) ^
                               (uint64_t(size) << 24) ^ (uint64_t(ac) << 16) ^ uint64_t(s))});

  std::vector<std::vector<CellRecord>> results(specs.size());
  std::atomic<size_t> cursor{0};
  std::atomic<int> witness_checks{0};

  auto worker = [&]() {
    while (true) {
      size_t i = cursor.fetch_add(1);
      if (i >= specs.size()) break;
      const CellSpec& spec = specs[i];
      Scenario sc;
      if (kind == SweepKind::ShortestPath) {
        int density = static_cast<int>(spec.instance_seed % 3) * 10;  // 0/10/20 extra-edge pct
        sc = random_shortest_path_instance(spec.size_param, spec.attacker_count, density,
                                           spec.instance_seed);
      } else {
        int levels = spec.size_param == 0 ? 1 : spec.size_param + 1;
        DestAttachment attach = spec.size_param == 0 ? DestAttachment::PeerOfTop
                               : (spec.instance_seed % 2 ? DestAttachment::CustomerOfTop
                                                         : DestAttachment::PeerOfTop);
        int width = 2 + static_cast<int>(spec.instance_seed % 2);
        sc = random_commercial_instance(levels, width, spec.attacker_count, spec.instance_seed,
                                        attach);
      }
      bool shortest = kind == SweepKind::ShortestPath;
      OracleResult oracle = shortest
                                ? fsr(*sc.graph, *sc.profile, *sc.attacks, spec.instance_seed)
                                : fr(*sc.graph, *sc.profile, *sc.attacks, spec.instance_seed);
      OracleResult oracle_alt = shortest
                                    ? fsr(*sc.graph, *sc.profile, *sc.attacks, ~spec.instance_seed)
                                    : fr(*sc.graph, *sc.profile, *sc.attacks, ~spec.instance_seed);
      bool seed_independent = true;
      for (const auto& [n, e] : oracle.assignment.fixed)
        if (oracle_alt.assignment.fixed.at(n).route != e.route) seed_independent = false;
      witness_checks += oracle.witness_checks;

      for (int config = 0; config < options.configs; ++config) {
        InitialConfig init =
            random_initial_config(*sc.graph, *sc.attacks, spec.instance_seed, config);
        uint64_t schedule_seed = mix64(spec.instance_seed ^ (0xabcdULL + config));
        CellRecord rec;
        rec.kind = kind;
        rec.size_param = spec.size_param;
        rec.attacker_count = spec.attacker_count;
        rec.instance_seed = spec.instance_seed;
        rec.config = config;
        rec.checks = run_cell(sc, &oracle, init, schedule_seed, sc.expected_round_bound);
        rec.checks.oracle_seed_independent = seed_independent;
        if (!rec.checks.ok()) rec.note = "scenario=" + sc.name;
        results[i].push_back(std::move(rec));
      }
    }
  };

  int jobs = options.jobs > 0 ? options.jobs
                              : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepReport report;
  for (auto& cell_group : results)
    for (auto& rec : cell_group) {
      if (!rec.checks.ok()) report.failures++;
      report.cells.push_back(std::move(rec));
    }
  report.witness_checks = witness_checks;
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace

SweepReport shortest_path_sweep(const SweepOptions& options, std::vector<int> sizes,
                                std::vector<int> attacker_counts) {
  return run_sweep(SweepKind::ShortestPath, sizes, attacker_counts, options);
}

SweepReport commercial_sweep(const SweepOptions& options, std::vector<int> depths,
                             std::vector<int> attacker_counts) {
  return run_sweep(SweepKind::Commercial, depths, attacker_counts, options);
}

SweepReport run_experiment(const Scenario& scenario, const std::vector<uint64_t>& schedule_seeds,
                           int configs, int round_bound) {
  auto t0 = std::chrono::steady_clock::now();
  SweepReport report;
  OracleResult oracle;
  bool have_oracle = scenario.oracle_applicable;
  if (have_oracle) {
    oracle = scenario.profile->mode == ProfileMode::Commercial
                 ? fr(*scenario.graph, *scenario.profile, *scenario.attacks, 0)
                 : fsr(*scenario.graph, *scenario.profile, *scenario.attacks, 0);
  }
  for (uint64_t seed : schedule_seeds) {
    for (int config = 0; config < configs; ++config) {
      InitialConfig init = random_initial_config(*scenario.graph, *scenario.attacks, seed, config);
      CellRecord rec;
      rec.instance_seed = seed;
      rec.config = config;
      rec.checks = run_cell(scenario, have_oracle ? &oracle : nullptr, init, seed, round_bound);
      if (!rec.checks.ok()) {
        rec.note = "scenario=" + scenario.name;
        report.failures++;
      }
      report.cells.push_back(std::move(rec));
    }
  }
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string SweepReport::to_text() const {
  std::ostringstream os;
  os << "cells=" << cells.size() << " failures=" << failures << " wall_ms=" << wall_ms << "\n";
  for (const auto& rec : cells) {
    if (rec.checks.ok()) continue;
    os << "FAIL sweep=" << (rec.kind == SweepKind::ShortestPath ? "shortest_path" : "commercial")
       << " size=" << rec.size_param
       << " attackers=" << rec.attacker_count << " seed=" << rec.instance_seed
       << " config=" << rec.config << " " << rec.note << "\n";
  }
  return os.str();
}

std::string SweepReport::to_ndjson() const {
  using nlohmann::json;
  std::ostringstream os;
  for (const auto& rec : cells) {
    json j{{"kind", "cell"},
           {"sweep", rec.kind == SweepKind::ShortestPath ? "shortest_path" : "commercial"},
           {"size", rec.size_param},
           {"attackers", rec.attacker_count},
           {"instance_seed", rec.instance_seed},
           {"config", rec.config},
           {"quiescent", rec.checks.quiescent},
           {"stabilization_round", rec.checks.stabilization_round},
           {"rounds_completed", rec.checks.rounds_completed},
           {"bound", rec.checks.bound},
           {"bound_ok", rec.checks.bound_ok},
           {"oracle_match", rec.checks.oracle_match},
           {"per_node_bounds_ok", rec.checks.per_node_bounds_ok},
           {"determinism_ok", rec.checks.determinism_ok},
           {"attacker_constancy_ok", rec.checks.attacker_constancy_ok},
           {"selections_simple_ok", rec.checks.selections_simple_ok},
           {"probe_ok", rec.checks.probe_ok},
           {"witnesses_ok", rec.checks.witnesses_ok},
           {"oracle_seed_independent", rec.checks.oracle_seed_independent},
           {"events", rec.checks.events},
           {"trace_hash", rec.checks.trace_hash},
           {"ok", rec.checks.ok()}};
    if (!rec.note.empty()) j["note"] = rec.note;
    os << j.dump() << "\n";
  }
  json summary{{"kind", "summary"},
               {"cells", cells.size()},
               {"failures", failures},
               {"witness_checks", witness_checks},
               {"ok", all_ok()},
               {"wall_ms", wall_ms}};
  os << summary.dump() << "\n";
  return os.str();
}

bool GadgetReport::ok() const {
  return pre_failures == 0 && post_oscillates && cycle_configurations >= 2 &&
         changing_nodes == std::set<NodeId>{1, 2, 3};
}

std::string GadgetReport::to_text() const {
  std::ostringstream os;
  os << "pre_runs=" << pre_runs << " pre_failures=" << pre_failures
     << " post_oscillates=" << (post_oscillates ? 1 : 0)
     << " cycle_configurations=" << cycle_configurations << " changing_nodes=";
  bool first = true;
  for (NodeId n : changing_nodes) {
    if (!first) os << ',';
    os << n;
    first = false;
  }
  os << " ok=" << (ok() ? 1 : 0) << "\n";
  return os.str();
}

GadgetReport gadget_check(int seeds) {
  GadgetReport report;
  Scenario pre = bad_gadget_scenario(false);
  for (int s = 0; s < seeds; ++s) {
    SimulationState state = initialize(*pre.graph, *pre.profile, *pre.attacks, {});
    FairRandomSchedule schedule(mix64(0x6ad6e7 + s));
    RunOptions opts;
    opts.events_max = 100000;
    Trace trace = run(state, schedule, opts);
    report.pre_runs++;
    bool ok = trace.stop == StopReason::Quiescent && trace.final_selections.at(1) == Route{1, 6} &&
              trace.final_selections.at(2) == Route{2, 6} &&
              trace.final_selections.at(3) == Route{3, 6};
    if (!ok) report.pre_failures++;
  }

  Scenario post = bad_gadget_scenario(true);
  SimulationState state = initialize(*post.graph, *post.profile, *post.attacks, {});
  SynchronousSchedule schedule;
  RunOptions opts;
  opts.events_max = 100000;
  opts.detect_cycles = true;
  Trace trace = run(state, schedule, opts);
  if (trace.stop == StopReason::OscillationFound && trace.witness) {
    report.post_oscillates = true;
    // distinct configurations around the cycle
    std::set<std::vector<std::pair<NodeId, Route>>> distinct;
    for (const auto& conf : trace.witness->cycle_selections)
      distinct.insert(std::vector<std::pair<NodeId, Route>>(conf.begin(), conf.end()));
    report.cycle_configurations = distinct.size();
    report.changing_nodes = trace.witness->changing_nodes;
  }
  return report;
}

}  // namespace frasim
