#include "frasim/frasim.h"

#include <cstring>
#include <sstream>
#include <string>

#include "core/engine.hpp"
#include "core/harness.hpp"
#include "core/oracle.hpp"
#include "core/text_format.hpp"

using namespace frasim;

struct frasim_graph {
  AsGraph g;
};
struct frasim_profile {
  PolicyProfile p;
};
struct frasim_attacks {
  AttackSet a;
};
struct frasim_sim_result {
  Trace trace;
};
struct frasim_oracle_result {
  OracleResult result;
};
struct frasim_sweep_result {
  SweepReport report;
};
struct frasim_gadget_result {
  GadgetReport report;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(malloc(s.size() + 1));
  memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Exceptions map onto error codes at the boundary.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return set_error(FRASIM_ERR_INVALID, e.what());
  } catch (const std::runtime_error& e) {
    return set_error(FRASIM_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return set_error(FRASIM_ERR_INTERNAL, e.what());
  }
}

int require(bool cond, const char* what) {
  if (!cond) return set_error(FRASIM_ERR_ARG, std::string("null argument: ") + what);
  return FRASIM_OK;
}

}  // namespace

extern "C" {

const char* frasim_last_error(void) { return g_last_error.c_str(); }

void frasim_string_free(char* s) { free(s); }

int frasim_graph_load(const char* path, frasim_graph** out) {
  if (int rc = require(path && out, "path/out")) return rc;
  return guarded([&] {
    auto* h = new frasim_graph{load_topology_file(path)};
    *out = h;
    return FRASIM_OK;
  });
}

int frasim_graph_parse(const char* text, frasim_graph** out) {
  if (int rc = require(text && out, "text/out")) return rc;
  return guarded([&] {
    std::istringstream is(text);
    auto* h = new frasim_graph{parse_topology(is)};
    *out = h;
    return FRASIM_OK;
  });
}

void frasim_graph_free(frasim_graph* g) { delete g; }

int frasim_graph_validate(const frasim_graph* g, int mode, int* ok, char** report_text) {
  if (int rc = require(g && ok, "graph/ok")) return rc;
  return guarded([&] {
    auto report =
        g->g.validate(mode == FRASIM_MODE_COMMERCIAL ? Mode::Commercial : Mode::ShortestPath);
    *ok = report.ok() ? 1 : 0;
    if (report_text) *report_text = dup_string(report.to_text());
    return FRASIM_OK;
  });
}

int frasim_graph_hierarchy_depth(const frasim_graph* g, int* depth) {
  if (int rc = require(g && depth, "graph/depth")) return rc;
  return guarded([&] {
    *depth = g->g.hierarchy_depth();
    return FRASIM_OK;
  });
}

int frasim_graph_node_count(const frasim_graph* g, size_t* count) {
  if (int rc = require(g && count, "graph/count")) return rc;
  *count = g->g.node_count();
  return FRASIM_OK;
}

int frasim_graph_labeled(const frasim_graph* g, int* has_labels) {
  if (int rc = require(g && has_labels, "graph/has_labels")) return rc;
  *has_labels = 0;
  for (const auto& e : g->g.edges())
    if (e.kind != EdgeKind::Plain) *has_labels = 1;
  return FRASIM_OK;
}

int frasim_graph_render(const frasim_graph* g, char** text) {
  if (int rc = require(g && text, "graph/text")) return rc;
  return guarded([&] {
    *text = dup_string(write_topology(g->g));
    return FRASIM_OK;
  });
}

int frasim_profile_shortest(const frasim_graph* g, uint64_t tie_seed, uint32_t export_pct,
                            frasim_profile** out) {
  if (int rc = require(g && out, "graph/out")) return rc;
  return guarded([&] {
    *out = new frasim_profile{make_shortest_path_profile(g->g, tie_seed, export_pct)};
    return FRASIM_OK;
  });
}

int frasim_profile_commercial(const frasim_graph* g, uint64_t tie_seed, int prefer_shorter,
                              int peer_over_provider, frasim_profile** out) {
  if (int rc = require(g && out, "graph/out")) return rc;
  return guarded([&] {
    *out = new frasim_profile{make_commercial_profile(
        g->g, tie_seed,
        prefer_shorter ? RankingFunction::IntraClassOrder::PreferShorter
                       : RankingFunction::IntraClassOrder::SeededArbitrary,
        peer_over_provider ? RankingFunction::PeerPreference::PeerOverProvider
                           : RankingFunction::PeerPreference::ProviderOverPeer)};
    return FRASIM_OK;
  });
}

int frasim_profile_apply_overrides(frasim_profile* p, const char* path) {
  if (int rc = require(p && path, "profile/path")) return rc;
  return guarded([&] {
    apply_profile_override_file(p->p, path);
    return FRASIM_OK;
  });
}

void frasim_profile_free(frasim_profile* p) { delete p; }

int frasim_attacks_load(const frasim_graph* g, const char* path, frasim_attacks** out) {
  if (int rc = require(g && path && out, "graph/path/out")) return rc;
  return guarded([&] {
    *out = new frasim_attacks{load_attack_file(g->g, path)};
    return FRASIM_OK;
  });
}

int frasim_attacks_empty(const frasim_graph* g, frasim_attacks** out) {
  if (int rc = require(g && out, "graph/out")) return rc;
  return guarded([&] {
    AttackSet set;
    for (NodeId a : g->g.attackers()) set.add(FixedRouteAttack(&g->g, a));
    *out = new frasim_attacks{std::move(set)};
    return FRASIM_OK;
  });
}

int frasim_attacks_hijack_all(const frasim_graph* g, frasim_attacks** out) {
  if (int rc = require(g && out, "graph/out")) return rc;
  return guarded([&] {
    AttackSet set;
    for (NodeId a : g->g.attackers()) set.add(prefix_hijack(a, g->g));
    *out = new frasim_attacks{std::move(set)};
    return FRASIM_OK;
  });
}

void frasim_attacks_free(frasim_attacks* a) { delete a; }

int frasim_simulate(const frasim_graph* g, const frasim_profile* p, const frasim_attacks* a,
                    const frasim_run_options* options, frasim_sim_result** out) {
  if (int rc = require(g && p && a && out, "graph/profile/attacks/out")) return rc;
  return guarded([&] {
    frasim_run_options def{};
    const frasim_run_options& o = options ? *options : def;
    InitialConfig init = random_initial_config(g->g, a->a, o.init_seed, o.init_flavor);
    SimulationState state = initialize(g->g, p->p, a->a, init);
    RunOptions ro;
    if (o.events_max) ro.events_max = o.events_max;
    ro.rounds_max = o.rounds_max;
    ro.record_event_log = o.record_event_log != 0;
    Trace trace;
    if (o.schedule_file) {
      FileSchedule schedule(load_schedule_file(o.schedule_file));
      ro.stop_on_quiescence = false;  // explicit schedules run to completion
      trace = run(state, schedule, ro);
    } else if (o.synchronous) {
      SynchronousSchedule schedule;
      ro.detect_cycles = true;
      trace = run(state, schedule, ro);
    } else {
      FairRandomSchedule schedule(o.schedule_seed);
      trace = run(state, schedule, ro);
    }
    *out = new frasim_sim_result{std::move(trace)};
    return FRASIM_OK;
  });
}

void frasim_sim_result_free(frasim_sim_result* r) { delete r; }

int frasim_sim_quiescent(const frasim_sim_result* r) { return r && r->trace.quiescent ? 1 : 0; }

int frasim_sim_oscillation_found(const frasim_sim_result* r) {
  return r && r->trace.witness ? 1 : 0;
}

int frasim_sim_rounds_completed(const frasim_sim_result* r) {
  return r ? r->trace.rounds_completed : 0;
}

int frasim_sim_stabilization_round(const frasim_sim_result* r) {
  return r ? r->trace.stabilization_round : 0;
}

uint64_t frasim_sim_events(const frasim_sim_result* r) { return r ? r->trace.events : 0; }

uint64_t frasim_sim_trace_hash(const frasim_sim_result* r) { return r ? r->trace.trace_hash : 0; }

int frasim_sim_final_route(const frasim_sim_result* r, int node, char** route_text) {
  if (int rc = require(r && route_text, "result/route_text")) return rc;
  auto it = r->trace.final_selections.find(node);
  if (it == r->trace.final_selections.end())
    return set_error(FRASIM_ERR_ARG, "node has no selection (attacker or destination?)");
  *route_text = dup_string(to_string(it->second));
  return FRASIM_OK;
}

int frasim_sim_render(const frasim_sim_result* r, int ndjson, char** text) {
  if (int rc = require(r && text, "result/text")) return rc;
  return guarded([&] {
    *text = dup_string(ndjson ? trace_to_ndjson(r->trace) : trace_to_text(r->trace, true));
    return FRASIM_OK;
  });
}

int frasim_oracle_run(const frasim_graph* g, const frasim_profile* p, const frasim_attacks* a,
                      uint64_t selection_seed, frasim_oracle_result** out) {
  if (int rc = require(g && p && a && out, "graph/profile/attacks/out")) return rc;
  return guarded([&] {
    OracleResult result = p->p.mode == ProfileMode::Commercial
                              ? fr(g->g, p->p, a->a, selection_seed)
                              : fsr(g->g, p->p, a->a, selection_seed);
    *out = new frasim_oracle_result{std::move(result)};
    return FRASIM_OK;
  });
}

void frasim_oracle_result_free(frasim_oracle_result* r) { delete r; }

int frasim_oracle_route(const frasim_oracle_result* r, int node, char** route_text) {
  if (int rc = require(r && route_text, "result/route_text")) return rc;
  auto it = r->result.assignment.fixed.find(node);
  if (it == r->result.assignment.fixed.end())
    return set_error(FRASIM_ERR_ARG, "node not in the fixed assignment");
  *route_text = dup_string(to_string(it->second.route));
  return FRASIM_OK;
}

int frasim_oracle_render(const frasim_oracle_result* r, int ndjson, char** text) {
  if (int rc = require(r && text, "result/text")) return rc;
  return guarded([&] {
    *text = dup_string(ndjson ? oracle_report_ndjson(r->result) : oracle_report_text(r->result));
    return FRASIM_OK;
  });
}

int frasim_sweep_run(int mode, const frasim_sweep_options* options, frasim_sweep_result** out) {
  if (int rc = require(out, "out")) return rc;
  if (mode != FRASIM_MODE_SHORTEST && mode != FRASIM_MODE_COMMERCIAL)
    return set_error(FRASIM_ERR_ARG, "mode must be shortest or commercial");
  return guarded([&] {
    SweepOptions so;
    if (options) {
      if (options->base_seed) so.base_seed = options->base_seed;
      if (options->seeds > 0) so.seeds = options->seeds;
      if (options->configs > 0) so.configs = options->configs;
      so.jobs = options->jobs;
    }
    SweepReport report =
        mode == FRASIM_MODE_SHORTEST ? shortest_path_sweep(so) : commercial_sweep(so);
    *out = new frasim_sweep_result{std::move(report)};
    return FRASIM_OK;
  });
}

void frasim_sweep_result_free(frasim_sweep_result* r) { delete r; }

int frasim_sweep_ok(const frasim_sweep_result* r) { return r && r->report.all_ok() ? 1 : 0; }

int frasim_sweep_failures(const frasim_sweep_result* r) { return r ? r->report.failures : -1; }

size_t frasim_sweep_cells(const frasim_sweep_result* r) { return r ? r->report.cells.size() : 0; }

int frasim_sweep_render(const frasim_sweep_result* r, int ndjson, char** text) {
  if (int rc = require(r && text, "result/text")) return rc;
  return guarded([&] {
    *text = dup_string(ndjson ? r->report.to_ndjson() : r->report.to_text());
    return FRASIM_OK;
  });
}

int frasim_gadget_run(int seeds, frasim_gadget_result** out) {
  if (int rc = require(out, "out")) return rc;
  if (seeds < 1) return set_error(FRASIM_ERR_ARG, "seeds must be positive");
  return guarded([&] {
    *out = new frasim_gadget_result{gadget_check(seeds)};
    return FRASIM_OK;
  });
}

void frasim_gadget_result_free(frasim_gadget_result* r) { delete r; }

int frasim_gadget_ok(const frasim_gadget_result* r) { return r && r->report.ok() ? 1 : 0; }

int frasim_gadget_render(const frasim_gadget_result* r, char** text) {
  if (int rc = require(r && text, "result/text")) return rc;
  *text = dup_string(r->report.to_text());
  return FRASIM_OK;
}

}  // extern "C"
