#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "attack.hpp"
#include "engine.hpp"
#include "graph.hpp"
#include "oracle.hpp"
#include "policy.hpp"

namespace frasim {

// Line-based topology format, '#' comments:
//   dest <id>
//   node <id> [attacker]
//   edge <u> <v> peer|plain
//   edge <customer> <provider> p2c
AsGraph parse_topology(std::istream& in);
AsGraph load_topology_file(const std::string& path);
std::string write_topology(const AsGraph& graph);

// Attack lines:
//   attack <attacker> <neighbor> <comma-separated node sequence>
//   attack <attacker> <neighbor> silence
AttackSet parse_attacks(const AsGraph& graph, std::istream& in);
AttackSet load_attack_file(const AsGraph& graph, const std::string& path);
std::string write_attacks(const AsGraph& graph, const AttackSet& attacks);

// Profile overrides:
//   rank <node> <route> > <route> > ...
//   export <node> <neighbor> allow|deny <route|all>
void apply_profile_overrides(PolicyProfile& profile, std::istream& in);
void apply_profile_override_file(PolicyProfile& profile, const std::string& path);

// Schedule lines: act <id,id,...> | dlv <u>-><v> <send_index> | drop <u>-><v> <send_index>
std::vector<ScheduleEvent> parse_schedule(std::istream& in);
std::vector<ScheduleEvent> load_schedule_file(const std::string& path);

Route parse_route(const std::string& text);

// Trace and report rendering. ndjson emits one JSON object per line.
std::string trace_to_text(const Trace& trace, bool include_event_log = false);
std::string trace_to_ndjson(const Trace& trace);
std::string oracle_report_text(const OracleResult& result);
std::string oracle_report_ndjson(const OracleResult& result);

}  // namespace frasim
