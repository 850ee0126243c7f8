#include "text_format.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace frasim {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

NodeId parse_id(const std::string& s) {
  size_t used = 0;
  int v = std::stoi(s, &used);
  if (used != s.size() || v < 0) throw std::invalid_argument("bad node id '" + s + "'");
  return v;
}

[[noreturn]] void fail(int lineno, const std::string& msg) {
  throw std::invalid_argument("line " + std::to_string(lineno) + ": " + msg);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

}  // namespace

Route parse_route(const std::string& text) {
  if (text == "none" || text == "empty") return Route{};
  std::vector<NodeId> hops;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (cur.empty()) throw std::invalid_argument("bad route '" + text + "'");
      hops.push_back(parse_id(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return Route(std::move(hops));
}

AsGraph parse_topology(std::istream& in) {
  // Two passes so edges may appear before their nodes' declarations.
  struct EdgeLine {
    NodeId u, v;
    EdgeKind kind;
    int lineno;
  };
  AsGraph g;
  std::vector<EdgeLine> edge_lines;
  bool have_dest = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "dest") {
      if (toks.size() != 2) fail(lineno, "dest expects one id");
      if (have_dest) fail(lineno, "duplicate dest line");
      g.set_destination(parse_id(toks[1]));
      have_dest = true;
    } else if (toks[0] == "node") {
      if (toks.size() < 2 || toks.size() > 3) fail(lineno, "node expects <id> [attacker]");
      bool attacker = toks.size() == 3;
      if (attacker && toks[2] != "attacker") fail(lineno, "unknown node flag '" + toks[2] + "'");
      g.add_node(parse_id(toks[1]), attacker);
    } else if (toks[0] == "edge") {
      if (toks.size() != 4) fail(lineno, "edge expects <u> <v> <kind>");
      EdgeKind kind;
      if (toks[3] == "peer")
        kind = EdgeKind::Peer;
      else if (toks[3] == "plain")
        kind = EdgeKind::Plain;
      else if (toks[3] == "p2c")
        kind = EdgeKind::P2C;
      else
        fail(lineno, "unknown edge kind '" + toks[3] + "'");
      edge_lines.push_back({parse_id(toks[1]), parse_id(toks[2]), kind, lineno});
    } else {
      fail(lineno, "unknown directive '" + toks[0] + "'");
    }
  }
  if (!have_dest) throw std::invalid_argument("topology has no dest line");
  for (const auto& e : edge_lines) {
    if (!g.has_node(e.u) || !g.has_node(e.v))
      fail(e.lineno, "edge references undeclared node");
    try {
      g.add_edge(e.u, e.v, e.kind);
    } catch (const std::invalid_argument& ex) {
      fail(e.lineno, ex.what());
    }
  }
  return g;
}

AsGraph load_topology_file(const std::string& path) {
  auto f = open_or_throw(path);
  return parse_topology(f);
}

std::string write_topology(const AsGraph& graph) {
  std::ostringstream os;
  os << "dest " << graph.destination() << "\n";
  for (NodeId n : graph.nodes()) {
    if (graph.is_destination(n)) continue;
    os << "node " << n << (graph.is_attacker(n) ? " attacker" : "") << "\n";
  }
  for (const auto& e : graph.edges()) {
    switch (e.kind) {
      case EdgeKind::P2C:
        os << "edge " << e.a << " " << e.b << " p2c\n";
        break;
      case EdgeKind::Peer:
        os << "edge " << e.a << " " << e.b << " peer\n";
        break;
      case EdgeKind::Plain:
        os << "edge " << e.a << " " << e.b << " plain\n";
        break;
    }
  }
  return os.str();
}

AttackSet parse_attacks(const AsGraph& graph, std::istream& in) {
  AttackSet set;
  for (NodeId a : graph.attackers()) set.add(FixedRouteAttack(&graph, a));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] != "attack") fail(lineno, "unknown directive '" + toks[0] + "'");
    if (toks.size() != 4) fail(lineno, "attack expects <attacker> <neighbor> <route|silence>");
    NodeId attacker = parse_id(toks[1]);
    NodeId neighbor = parse_id(toks[2]);
    if (!graph.is_attacker(attacker)) fail(lineno, "node is not declared as attacker");
    auto it = set.attacks.find(attacker);
    try {
      if (toks[3] == "silence")
        it->second.set_silence(neighbor);
      else
        it->second.set_announcement(neighbor, parse_route(toks[3]));
    } catch (const std::invalid_argument& ex) {
      fail(lineno, ex.what());
    }
  }
  return set;
}

AttackSet load_attack_file(const AsGraph& graph, const std::string& path) {
  auto f = open_or_throw(path);
  return parse_attacks(graph, f);
}

std::string write_attacks(const AsGraph& graph, const AttackSet& attacks) {
  std::ostringstream os;
  for (const auto& [a, atk] : attacks.attacks) {
    for (const auto& nb : graph.neighbors(a)) {
      auto ann = atk.announcement_for(nb.id);
      os << "attack " << a << " " << nb.id << " " << (ann ? to_string(*ann) : "silence") << "\n";
    }
  }
  return os.str();
}

void apply_profile_overrides(PolicyProfile& profile, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "rank") {
      // rank <node> <route> > <route> > ...
      if (toks.size() < 3) fail(lineno, "rank expects <node> <route> [> <route> ...]");
      NodeId node = parse_id(toks[1]);
      std::vector<Route> ordered;
      bool expect_route = true;
      for (size_t i = 2; i < toks.size(); ++i) {
        if (expect_route) {
          Route r = parse_route(toks[i]);
          if (r.empty() || r.owner() != node) fail(lineno, "ranked route not owned by node");
          ordered.push_back(std::move(r));
        } else if (toks[i] != ">") {
          fail(lineno, "expected '>' between routes");
        }
        expect_route = !expect_route;
      }
      auto it = profile.rankings.find(node);
      if (it == profile.rankings.end()) fail(lineno, "no ranking for node (attacker or destination?)");
      it->second.pin_order(std::move(ordered));
    } else if (toks[0] == "export") {
      // export <node> <neighbor> allow|deny <route|all>
      if (toks.size() != 5) fail(lineno, "export expects <node> <neighbor> allow|deny <route|all>");
      NodeId node = parse_id(toks[1]);
      ExportPolicy::OverrideRule rule;
      rule.neighbor = parse_id(toks[2]);
      if (toks[3] == "allow")
        rule.allow = true;
      else if (toks[3] == "deny")
        rule.allow = false;
      else
        fail(lineno, "expected allow|deny");
      if (toks[4] == "all")
        rule.all = true;
      else
        rule.route = parse_route(toks[4]);
      auto it = profile.exports.find(node);
      if (it == profile.exports.end()) fail(lineno, "no export policy for node");
      it->second.add_override(std::move(rule));
    } else {
      fail(lineno, "unknown directive '" + toks[0] + "'");
    }
  }
  profile.mode = ProfileMode::Custom;
}

void apply_profile_override_file(PolicyProfile& profile, const std::string& path) {
  auto f = open_or_throw(path);
  apply_profile_overrides(profile, f);
}

std::vector<ScheduleEvent> parse_schedule(std::istream& in) {
  std::vector<ScheduleEvent> events;
  std::string line;
  int lineno = 0;
  auto parse_edge = [&](const std::string& s, NodeId& u, NodeId& v) {
    auto arrow = s.find("->");
    if (arrow == std::string::npos) fail(lineno, "expected <u>-><v>");
    u = parse_id(s.substr(0, arrow));
    v = parse_id(s.substr(arrow + 2));
  };
  while (std::getline(in, line)) {
    lineno++;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "act") {
      if (toks.size() != 2) fail(lineno, "act expects <id,id,...>");
      ActivateEvent ev;
      for (NodeId id : parse_route(toks[1]).hops) ev.nodes.push_back(id);
      events.push_back(ev);
    } else if (toks[0] == "dlv" || toks[0] == "drop") {
      if (toks.size() != 3) fail(lineno, "expected <u>-><v> <send_index>");
      NodeId u, v;
      parse_edge(toks[1], u, v);
      uint64_t idx = std::stoull(toks[2]);
      if (toks[0] == "dlv")
        events.push_back(DeliverEvent{u, v, idx});
      else
        events.push_back(DropEvent{u, v, idx});
    } else {
      fail(lineno, "unknown directive '" + toks[0] + "'");
    }
  }
  return events;
}

std::vector<ScheduleEvent> load_schedule_file(const std::string& path) {
  auto f = open_or_throw(path);
  return parse_schedule(f);
}

namespace {
const char* stop_name(StopReason r) {
  switch (r) {
    case StopReason::Quiescent:
      return "quiescent";
    case StopReason::EventBudget:
      return "event_budget";
    case StopReason::RoundBudget:
      return "round_budget";
    case StopReason::ScheduleExhausted:
      return "schedule_exhausted";
    case StopReason::OscillationFound:
      return "oscillation";
  }
  return "?";
}
}  // namespace

std::string trace_to_text(const Trace& trace, bool include_event_log) {
  std::ostringstream os;
  if (include_event_log)
    for (const auto& l : trace.event_log) os << l << "\n";
  for (const auto& c : trace.changes)
    os << "t=" << c.clock << " ev=sel node=" << c.node << " sel=" << to_string(c.selection)
       << " round=" << c.round << "\n";
  os << "summary stop=" << stop_name(trace.stop) << " quiescent=" << (trace.quiescent ? 1 : 0)
     << " rounds=" << trace.rounds_completed << " stabilization_round=" << trace.stabilization_round
     << " events=" << trace.events << "\n";
  for (const auto& [n, r] : trace.final_selections)
    os << "final node=" << n << " sel=" << to_string(r)
       << " last_change_round=" << trace.last_change_round.at(n) << "\n";
  if (trace.witness) {
    os << "oscillation cycle_events=" << trace.witness->cycle_length_events << " nodes=";
    bool first = true;
    for (NodeId n : trace.witness->changing_nodes) {
      if (!first) os << ',';
      os << n;
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

std::string trace_to_ndjson(const Trace& trace) {
  using nlohmann::json;
  std::ostringstream os;
  for (const auto& c : trace.changes) {
    json j{{"kind", "sel"},
           {"t", c.clock},
           {"node", c.node},
           {"sel", to_string(c.selection)},
           {"round", c.round}};
    os << j.dump() << "\n";
  }
  json finals = json::object();
  json rounds = json::object();
  for (const auto& [n, r] : trace.final_selections) {
    finals[std::to_string(n)] = to_string(r);
    rounds[std::to_string(n)] = trace.last_change_round.at(n);
  }
  json summary{{"kind", "summary"},
               {"stop", stop_name(trace.stop)},
               {"quiescent", trace.quiescent},
               {"rounds", trace.rounds_completed},
               {"stabilization_round", trace.stabilization_round},
               {"events", trace.events},
               {"final", finals},
               {"last_change_round", rounds},
               {"trace_hash", trace.trace_hash}};
  if (trace.witness) {
    summary["oscillation"] = {
        {"cycle_events", trace.witness->cycle_length_events},
        {"changing_nodes", std::vector<NodeId>(trace.witness->changing_nodes.begin(),
                                               trace.witness->changing_nodes.end())}};
  }
  os << summary.dump() << "\n";
  return os.str();
}

namespace {
const char* phase_name(FixPhase p) {
  switch (p) {
    case FixPhase::FSR:
      return "fsr";
    case FixPhase::FCR:
      return "fcr";
    case FixPhase::FPeeR:
      return "fpeer";
    case FixPhase::FPrvR:
      return "fprvr";
  }
  return "?";
}
}  // namespace

std::string oracle_report_text(const OracleResult& result) {
  std::ostringstream os;
  os << "oracle seed=" << result.assignment.selection_seed;
  if (result.assignment.hierarchy_depth >= 0)
    os << " hierarchy_depth=" << result.assignment.hierarchy_depth;
  os << "\n";
  for (const auto& [n, e] : result.assignment.fixed)
    os << "fixed node=" << n << " route=" << to_string(e.route) << " phase=" << phase_name(e.phase)
       << " index=" << e.order << " round_bound=" << e.predicted_round_bound << "\n";
  return os.str();
}

std::string oracle_report_ndjson(const OracleResult& result) {
  using nlohmann::json;
  std::ostringstream os;
  for (const auto& [n, e] : result.assignment.fixed) {
    json j{{"kind", "fixed"},
           {"node", n},
           {"route", to_string(e.route)},
           {"phase", phase_name(e.phase)},
           {"index", e.order},
           {"round_bound", e.predicted_round_bound}};
    os << j.dump() << "\n";
  }
  json summary{{"kind", "oracle_summary"},
               {"seed", result.assignment.selection_seed},
               {"witness_checks", result.witness_checks},
               {"witness_failures", result.witness_failures},
               {"walk_overflows", result.walk_overflows}};
  if (result.assignment.hierarchy_depth >= 0)
    summary["hierarchy_depth"] = result.assignment.hierarchy_depth;
  os << summary.dump() << "\n";
  return os.str();
}

}  // namespace frasim
