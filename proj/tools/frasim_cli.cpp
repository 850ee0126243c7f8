// Command-line front end; drives the simulator through the C API only.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "frasim/frasim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitExpectationFailed = 1;
constexpr int kExitInputError = 2;

struct StringOut {
  char* s = nullptr;
  ~StringOut() { frasim_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

int fail_input(const std::string& context) {
  std::cerr << "error: " << context << ": " << frasim_last_error() << "\n";
  return kExitInputError;
}

int emit(const std::string& text, const std::string& report_path) {
  if (report_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream f(report_path);
  if (!f) {
    std::cerr << "error: cannot write " << report_path << "\n";
    return kExitInputError;
  }
  f << text;
  return kExitOk;
}

struct GraphHandle {
  frasim_graph* g = nullptr;
  ~GraphHandle() { frasim_graph_free(g); }
};
struct ProfileHandle {
  frasim_profile* p = nullptr;
  ~ProfileHandle() { frasim_profile_free(p); }
};
struct AttacksHandle {
  frasim_attacks* a = nullptr;
  ~AttacksHandle() { frasim_attacks_free(a); }
};

struct ProfileFlags {
  std::string profile = "auto";  // auto|shortest|commercial
  std::string overrides;
  uint64_t tie_seed = 1;
  uint32_t export_pct = 100;
  std::string intra = "shorter";     // shorter|arbitrary
  std::string peer_pref = "peer";    // peer|provider
};

void add_profile_flags(CLI::App* cmd, ProfileFlags& flags) {
  cmd->add_option("--profile", flags.profile, "Policy profile: auto, shortest, commercial")
      ->check(CLI::IsMember({"auto", "shortest", "commercial"}));
  cmd->add_option("--overrides", flags.overrides, "Profile override file (rank/export lines)");
  cmd->add_option("--tie-seed", flags.tie_seed, "Seed for ranking tie-breaking");
  cmd->add_option("--export-pct", flags.export_pct,
                  "Shortest-path export permissiveness (100 = export-all)");
  cmd->add_option("--intra-class", flags.intra, "Commercial intra-class order: shorter, arbitrary")
      ->check(CLI::IsMember({"shorter", "arbitrary"}));
  cmd->add_option("--peer-pref", flags.peer_pref,
                  "Commercial tier of peers vs providers: peer, provider")
      ->check(CLI::IsMember({"peer", "provider"}));
}

int build_profile(const GraphHandle& graph, const ProfileFlags& flags, ProfileHandle& out) {
  std::string kind = flags.profile;
  if (kind == "auto") {
    int labeled = 0;
    frasim_graph_labeled(graph.g, &labeled);
    kind = labeled ? "commercial" : "shortest";
  }
  int rc;
  if (kind == "commercial")
    rc = frasim_profile_commercial(graph.g, flags.tie_seed, flags.intra == "shorter",
                                   flags.peer_pref == "peer", &out.p);
  else
    rc = frasim_profile_shortest(graph.g, flags.tie_seed, flags.export_pct, &out.p);
  if (rc != FRASIM_OK) return fail_input("building profile");
  if (!flags.overrides.empty() &&
      frasim_profile_apply_overrides(out.p, flags.overrides.c_str()) != FRASIM_OK)
    return fail_input("applying overrides");
  return kExitOk;
}

int load_attacks(const GraphHandle& graph, const std::string& attack_path, AttacksHandle& out) {
  int rc = attack_path.empty() ? frasim_attacks_empty(graph.g, &out.a)
                               : frasim_attacks_load(graph.g, attack_path.c_str(), &out.a);
  if (rc != FRASIM_OK) return fail_input("loading attacks");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous path-vector routing simulator with fixed-route attackers"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "Check a topology's structural invariants");
  std::string v_topology, v_mode = "auto";
  validate->add_option("--topology", v_topology, "Topology file")->required();
  validate->add_option("--mode", v_mode, "Validation mode: auto, shortest, commercial")
      ->check(CLI::IsMember({"auto", "shortest", "commercial"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run the asynchronous dynamics");
  std::string s_topology, s_attack, s_schedule, s_report, s_format = "text";
  uint64_t s_seed = 0, s_events_max = 0, s_init_seed = 0;
  int s_rounds_max = 0, s_init_flavor = 0;
  bool s_sync = false, s_verbose = false;
  ProfileFlags s_flags;
  simulate->add_option("--topology", s_topology, "Topology file")->required();
  simulate->add_option("--attack", s_attack, "Attack file");
  simulate->add_option("--schedule", s_schedule, "Explicit schedule file");
  simulate->add_flag("--sync", s_sync, "Synchronous deterministic schedule with cycle detection");
  simulate->add_option("--seed", s_seed, "Fair random schedule seed");
  simulate->add_option("--events-max", s_events_max, "Event budget");
  simulate->add_option("--rounds-max", s_rounds_max, "Round budget");
  simulate->add_option("--init-flavor", s_init_flavor,
                       "Initial configuration flavor (0 = all-empty)");
  simulate->add_option("--init-seed", s_init_seed, "Initial configuration seed");
  simulate->add_option("--report", s_report, "Write output to file instead of stdout");
  simulate->add_option("--format", s_format, "Output format")
      ->check(CLI::IsMember({"text", "ndjson"}));
  simulate->add_flag("--verbose", s_verbose, "Include the raw event log (text format)");
  add_profile_flags(simulate, s_flags);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Compute the fixed-point stable assignment");
  std::string o_topology, o_attack, o_report, o_format = "text";
  uint64_t o_seed = 0;
  ProfileFlags o_flags;
  oracle->add_option("--topology", o_topology, "Topology file")->required();
  oracle->add_option("--attack", o_attack, "Attack file");
  oracle->add_option("--seed", o_seed, "Selection seed");
  oracle->add_option("--report", o_report, "Write output to file instead of stdout");
  oracle->add_option("--format", o_format, "Output format")
      ->check(CLI::IsMember({"text", "ndjson"}));
  add_profile_flags(oracle, o_flags);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Round-bound and oracle-agreement sweeps");
  std::string w_policy = "both";
  int w_seeds = 100, w_configs = 3, w_jobs = 0;
  uint64_t w_base_seed = 0;
  std::string w_report, w_format = "text";
  sweep->add_option("--policy", w_policy, "Instance family: shortest, commercial, both")
      ->check(CLI::IsMember({"shortest", "commercial", "both"}));
  sweep->add_option("--seeds", w_seeds, "Instance seeds per parameter cell");
  sweep->add_option("--configs", w_configs, "Initial configurations per seed");
  sweep->add_option("--jobs", w_jobs, "Worker threads (0 = hardware)");
  sweep->add_option("--base-seed", w_base_seed, "Base seed");
  sweep->add_option("--report", w_report, "Write report to file instead of stdout");
  sweep->add_option("--format", w_format, "Report format")
      ->check(CLI::IsMember({"text", "ndjson"}));

  // gadget
  auto* gadget = app.add_subcommand("gadget", "Canonical destabilization scenario checks");
  int g_seeds = 100;
  std::string g_report;
  gadget->add_option("--seeds", g_seeds, "Fair seeds for the pre-attack stability check");
  gadget->add_option("--report", g_report, "Write output to file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    GraphHandle graph;
    if (frasim_graph_load(v_topology.c_str(), &graph.g) != FRASIM_OK)
      return fail_input("loading topology");
    int mode = FRASIM_MODE_SHORTEST;
    if (v_mode == "commercial")
      mode = FRASIM_MODE_COMMERCIAL;
    else if (v_mode == "auto") {
      int labeled = 0;
      frasim_graph_labeled(graph.g, &labeled);
      mode = labeled ? FRASIM_MODE_COMMERCIAL : FRASIM_MODE_SHORTEST;
    }
    int ok = 0;
    StringOut report;
    if (frasim_graph_validate(graph.g, mode, &ok, &report.s) != FRASIM_OK)
      return fail_input("validating");
    std::cout << report.str();
    return ok ? kExitOk : kExitExpectationFailed;
  }

  if (simulate->parsed()) {
    GraphHandle graph;
    if (frasim_graph_load(s_topology.c_str(), &graph.g) != FRASIM_OK)
      return fail_input("loading topology");
    ProfileHandle profile;
    if (int rc = build_profile(graph, s_flags, profile)) return rc;
    AttacksHandle attacks;
    if (int rc = load_attacks(graph, s_attack, attacks)) return rc;

    frasim_run_options opts{};
    opts.schedule_seed = s_seed;
    opts.events_max = s_events_max;
    opts.rounds_max = s_rounds_max;
    opts.synchronous = s_sync ? 1 : 0;
    opts.schedule_file = s_schedule.empty() ? nullptr : s_schedule.c_str();
    opts.init_flavor = s_init_flavor;
    opts.init_seed = s_init_seed;
    opts.record_event_log = s_verbose ? 1 : 0;

    frasim_sim_result* result = nullptr;
    if (frasim_simulate(graph.g, profile.p, attacks.a, &opts, &result) != FRASIM_OK)
      return fail_input("simulating");
    StringOut text;
    frasim_sim_render(result, s_format == "ndjson" ? 1 : 0, &text.s);
    frasim_sim_result_free(result);
    return emit(text.str(), s_report);
  }

  if (oracle->parsed()) {
    GraphHandle graph;
    if (frasim_graph_load(o_topology.c_str(), &graph.g) != FRASIM_OK)
      return fail_input("loading topology");
    ProfileHandle profile;
    if (int rc = build_profile(graph, o_flags, profile)) return rc;
    AttacksHandle attacks;
    if (int rc = load_attacks(graph, o_attack, attacks)) return rc;

    frasim_oracle_result* result = nullptr;
    if (frasim_oracle_run(graph.g, profile.p, attacks.a, o_seed, &result) != FRASIM_OK)
      return fail_input("running oracle");
    StringOut text;
    frasim_oracle_render(result, o_format == "ndjson" ? 1 : 0, &text.s);
    frasim_oracle_result_free(result);
    return emit(text.str(), o_report);
  }

  if (sweep->parsed()) {
    frasim_sweep_options opts{};
    opts.base_seed = w_base_seed;
    opts.seeds = w_seeds;
    opts.configs = w_configs;
    opts.jobs = w_jobs;
    bool all_ok = true;
    std::string combined;
    for (int mode : {FRASIM_MODE_SHORTEST, FRASIM_MODE_COMMERCIAL}) {
      if (w_policy == "shortest" && mode != FRASIM_MODE_SHORTEST) continue;
      if (w_policy == "commercial" && mode != FRASIM_MODE_COMMERCIAL) continue;
      frasim_sweep_result* result = nullptr;
      if (frasim_sweep_run(mode, &opts, &result) != FRASIM_OK)
        return fail_input("running sweep");
      StringOut text;
      frasim_sweep_render(result, w_format == "ndjson" ? 1 : 0, &text.s);
      combined += text.str();
      if (!frasim_sweep_ok(result)) all_ok = false;
      frasim_sweep_result_free(result);
    }
    int rc = emit(combined, w_report);
    if (rc != kExitOk) return rc;
    return all_ok ? kExitOk : kExitExpectationFailed;
  }

  if (gadget->parsed()) {
    frasim_gadget_result* result = nullptr;
    if (frasim_gadget_run(g_seeds, &result) != FRASIM_OK) return fail_input("running gadget");
    StringOut text;
    frasim_gadget_render(result, &text.s);
    bool ok = frasim_gadget_ok(result);
    frasim_gadget_result_free(result);
    int rc = emit(text.str(), g_report);
    if (rc != kExitOk) return rc;
    return ok ? kExitOk : kExitExpectationFailed;
  }

  return kExitInputError;
}
