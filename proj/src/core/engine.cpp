#include "engine.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace frasim {

void RoundLedger::start(const std::set<NodeId>& all_nodes,
                        const std::map<DirectedEdge, Channel>& channels) {
  required_seq_.clear();
  remaining_.clear();
  done_.clear();
  for (NodeId n : all_nodes) {
    remaining_[n] = 0;
    done_[n] = false;
  }
  for (const auto& [edge, ch] : channels) {
    if (!ch.in_flight.empty()) {
      uint64_t newest = 0;
      for (const auto& m : ch.in_flight) newest = std::max(newest, m.send_index);
      required_seq_[edge] = newest;
      remaining_[edge.second]++;
    }
  }
  pending_nodes_ = static_cast<int>(all_nodes.size());
}

void RoundLedger::on_deliver(DirectedEdge edge, uint64_t send_index) {
  auto it = required_seq_.find(edge);
  if (it == required_seq_.end() || it->second == 0 || send_index < it->second) return;
  it->second = 0;
  remaining_[edge.second]--;
}

void RoundLedger::on_activate(NodeId node) {
  auto it = remaining_.find(node);
  if (it == remaining_.end() || it->second > 0) return;
  auto& d = done_[node];
  if (!d) {
    d = true;
    pending_nodes_--;
  }
}

void SimulationState::enqueue(NodeId from, NodeId to, Route content) {
  if (graph->is_attacker(from)) {
    uint64_t h = hash_route(8, content);
    auto [it, fresh] = attacker_sent_hash.try_emplace({from, to}, h);
    if (!fresh && it->second != h) attacker_constancy_ok = false;
  }
  auto& ch = channels.at({from, to});
  ch.in_flight.push_back(UpdateMessage{from, to, std::move(content), ch.next_seq++});
  messages_sent++;
  if (ch.in_flight.size() > options.channel_capacity) {
    ch.in_flight.pop_front();
    ch.capacity_drops++;
    messages_dropped++;
  }
}

uint64_t SimulationState::config_hash() const {
  uint64_t h = 0x6a09e667f3bcc908ULL;
  for (const auto& [id, ns] : nodes) {
    h = hash_combine(h, static_cast<uint64_t>(id));
    h = hash_combine(h, hash_route(2, ns.selection));
    for (const auto& [nb, content] : ns.rib_in) {
      h = hash_combine(h, static_cast<uint64_t>(nb) + 0x100);
      h = hash_combine(h, hash_route(3, content));
    }
    // Only the newest pending message per sender can take effect.
    std::map<NodeId, const UpdateMessage*> newest;
    for (const auto& m : ns.pending) {
      auto& slot = newest[m.sender];
      if (!slot || m.send_index > slot->send_index) slot = &m;
    }
    for (const auto& [nb, m] : newest) {
      if (m->send_index <= ns.rib_seq.at(nb)) continue;
      h = hash_combine(h, static_cast<uint64_t>(nb) + 0x200);
      h = hash_combine(h, hash_route(4, m->content));
    }
  }
  for (const auto& [edge, ch] : channels) {
    if (ch.in_flight.empty()) continue;
    h = hash_combine(h, static_cast<uint64_t>(edge.first) * 131071 + edge.second);
    for (const auto& m : ch.in_flight) h = hash_combine(h, hash_route(5, m.content));
  }
  for (const auto& [edge, r] : last_sent) {
    h = hash_combine(h, static_cast<uint64_t>(edge.first) * 524287 + edge.second);
    h = hash_combine(h, hash_route(6, r));
  }
  return h;
}

int SimulationState::stabilization_round() const {
  int r = 0;
  for (const auto& [n, lr] : last_change_round) r = std::max(r, lr);
  return r;
}

SimulationState initialize(const AsGraph& graph, const PolicyProfile& profile,
                           const AttackSet& attacks, const InitialConfig& init,
                           const EngineOptions& options) {
  SimulationState st;
  st.graph = &graph;
  st.profile = &profile;
  st.attacks = &attacks;
  st.options = options;

  for (NodeId n : graph.nodes())
    for (const auto& nb : graph.neighbors(n)) st.channels[{n, nb.id}];

  NodeId d = graph.destination();
  for (NodeId n : graph.source_nodes()) {
    NodeState ns;
    for (const auto& nb : graph.neighbors(n)) {
      ns.rib_in[nb.id] = Route{};
      ns.rib_seq[nb.id] = 0;
    }
    auto sel_it = init.selections.find(n);
    if (sel_it != init.selections.end() && !sel_it->second.empty()) {
      if (sel_it->second.owner() != n)
        throw std::invalid_argument("initial route not owned by node " + std::to_string(n));
      ns.selection = sel_it->second;
    }
    auto rib_it = init.rib.find(n);
    if (rib_it != init.rib.end()) {
      for (const auto& [nb, content] : rib_it->second) {
        if (!ns.rib_in.count(nb))
          throw std::invalid_argument("initial rib entry for non-neighbor of node " +
                                      std::to_string(n));
        ns.rib_in[nb] = content;
      }
    }
    st.nodes.emplace(n, std::move(ns));
    st.last_change_round[n] = 0;
  }

  if (options.seed_initial_messages) {
    // The destination announces itself from the start.
    for (const auto& nb : graph.neighbors(d)) {
      st.enqueue(d, nb.id, Route{d});
      st.last_sent[{d, nb.id}] = Route{d};
      st.ever_sent[{d, nb.id}] = true;
    }
    // Attackers announce their fixed routes from the start.
    for (NodeId a : graph.attackers()) {
      const FixedRouteAttack* atk = attacks.find(a);
      for (const auto& nb : graph.neighbors(a)) {
        std::optional<Route> ann = atk ? atk->announcement_for(nb.id) : std::nullopt;
        if (ann) st.enqueue(a, nb.id, *ann);
      }
    }
    // Each source's initial exported values are in flight as well: the
    // initial configuration behaves as if every node had just announced its
    // (possibly bogus) state.
    for (auto& [n, ns] : st.nodes) {
      for (const auto& nb : graph.neighbors(n)) {
        Route exported =
            profile.export_for(n).permit(nb.id, ns.selection) ? ns.selection : Route{};
        st.enqueue(n, nb.id, exported);
        st.last_sent[{n, nb.id}] = exported;
        st.ever_sent[{n, nb.id}] = true;
      }
    }
  }
  st.ledger.start(graph.nodes(), st.channels);
  return st;
}

namespace {

// Best loop-free extension of the processed announcements, or empty.
std::pair<Route, std::optional<NodeId>> best_selection(const SimulationState& st, NodeId v,
                                                       const NodeState& ns) {
  const RankingFunction& rank = st.profile->ranking_for(v);
  Route best;
  std::optional<NodeId> best_from;
  for (const auto& [nb, content] : ns.rib_in) {
    if (content.empty()) continue;
    if (content.contains(v)) continue;  // loop check
    Route cand = content.prepend(v);
    if (!cand.is_simple()) continue;
    if (cand.last() != st.graph->destination()) continue;
    if (best.empty() || rank.strictly_better(cand, best, nb, best_from)) {
      best = std::move(cand);
      best_from = nb;
    }
  }
  return {best, best_from};
}

void activate_source(SimulationState& st, NodeId v) {
  NodeState& ns = st.nodes.at(v);
  // Fold pending messages: per sender only the most recent one takes effect,
  // and nothing older than what was already processed.
  for (const auto& m : ns.pending) {
    auto& seq = ns.rib_seq.at(m.sender);
    if (m.send_index > seq) {
      seq = m.send_index;
      ns.rib_in.at(m.sender) = m.content;
    }
  }
  ns.pending.clear();

  auto [sel, sel_from] = best_selection(st, v, ns);
  if (sel != ns.selection) {
    ns.selection = sel;
    ns.selection_learned_from = sel_from;
    int round = st.ledger.current_round();
    st.last_change_round[v] = round;
    st.changes.push_back({st.clock, round, v, sel});
    st.rolling_hash = hash_combine(st.rolling_hash, hash_route(7, sel) ^ (uint64_t)v);
  } else if (sel_from != ns.selection_learned_from) {
    ns.selection_learned_from = sel_from;
  }

  const ExportPolicy& exp = st.profile->export_for(v);
  for (const auto& nb : st.graph->neighbors(v)) {
    Route exported = exp.permit(nb.id, ns.selection) ? ns.selection : Route{};
    DirectedEdge edge{v, nb.id};
    auto sent_it = st.ever_sent.find(edge);
    bool unsent = sent_it == st.ever_sent.end() || !sent_it->second;
    if (unsent || st.last_sent[edge] != exported) {
      st.enqueue(v, nb.id, exported);
      st.last_sent[edge] = exported;
      st.ever_sent[edge] = true;
    }
  }
}

void activate_node(SimulationState& st, NodeId id) {
  const AsGraph& g = *st.graph;
  if (g.is_destination(id)) {
    for (const auto& nb : g.neighbors(id)) st.enqueue(id, nb.id, Route{id});
    return;
  }
  if (g.is_attacker(id)) {
    const FixedRouteAttack* atk = st.attacks->find(id);
    if (!atk) return;
    for (const auto& nb : g.neighbors(id)) {
      if (auto ann = atk->announcement_for(nb.id)) st.enqueue(id, nb.id, *ann);
    }
    return;
  }
  activate_source(st, id);
}

}  // namespace

bool step(SimulationState& st, const ScheduleEvent& event) {
  size_t changes_before = st.changes.size();
  st.clock++;
  if (const auto* act = std::get_if<ActivateEvent>(&event)) {
    std::vector<NodeId> ids = act->nodes;
    std::sort(ids.begin(), ids.end());
    for (NodeId id : ids)
      if (!st.graph->has_node(id)) throw std::invalid_argument("activate: unknown node");
    for (NodeId id : ids) {
      activate_node(st, id);
      st.ledger.on_activate(id);
    }
    st.rolling_hash = hash_combine(st.rolling_hash, 0xAC7 ^ mix64(ids.empty() ? 0 : ids[0]));
  } else if (const auto* dlv = std::get_if<DeliverEvent>(&event)) {
    auto it = st.channels.find({dlv->from, dlv->to});
    if (it == st.channels.end()) throw std::invalid_argument("deliver: unknown edge");
    auto& q = it->second.in_flight;
    if (!q.empty()) {
      auto pos = q.begin();
      if (dlv->send_index != 0) {
        pos = std::find_if(q.begin(), q.end(),
                           [&](const UpdateMessage& m) { return m.send_index == dlv->send_index; });
        if (pos == q.end()) pos = q.begin();  // capacity-dropped meanwhile: fall back
      }
      UpdateMessage m = *pos;
      q.erase(pos);
      st.ledger.on_deliver({dlv->from, dlv->to}, m.send_index);
      auto node_it = st.nodes.find(dlv->to);
      if (node_it != st.nodes.end()) node_it->second.pending.push_back(std::move(m));
      st.rolling_hash =
          hash_combine(st.rolling_hash, 0xDE1 ^ mix64((uint64_t)dlv->from << 20 | (uint64_t)dlv->to));
    }
  } else if (const auto* drop = std::get_if<DropEvent>(&event)) {
    auto it = st.channels.find({drop->from, drop->to});
    if (it == st.channels.end()) throw std::invalid_argument("drop: unknown edge");
    auto& q = it->second.in_flight;
    if (!q.empty()) {
      auto pos = q.begin();
      if (drop->send_index != 0) {
        pos = std::find_if(q.begin(), q.end(),
                           [&](const UpdateMessage& m) { return m.send_index == drop->send_index; });
        if (pos == q.end()) pos = q.begin();
      }
      q.erase(pos);
      st.messages_dropped++;
      st.rolling_hash = hash_combine(st.rolling_hash, 0xD20 ^ mix64((uint64_t)drop->from));
    }
  }
  if (st.ledger.closed()) {
    st.ledger.mark_closed_and_count();
    st.ledger.start(st.graph->nodes(), st.channels);
  }
  return st.changes.size() != changes_before;
}

bool detect_quiescence(const SimulationState& st) {
  for (const auto& [v, ns] : st.nodes) {
    // Every undelivered or unprocessed message must already match the
    // believed announcement, so any delivery order is a no-op.
    for (const auto& [nb, content] : ns.rib_in) {
      auto ch_it = st.channels.find({nb, v});
      if (ch_it != st.channels.end()) {
        for (const auto& m : ch_it->second.in_flight)
          if (m.send_index > ns.rib_seq.at(nb) && m.content != content) return false;
      }
    }
    for (const auto& m : ns.pending)
      if (m.send_index > ns.rib_seq.at(m.sender) && m.content != ns.rib_in.at(m.sender))
        return false;
    auto [sel, sel_from] = best_selection(st, v, ns);
    (void)sel_from;
    if (sel != ns.selection) return false;
    // A hypothetical activation must not emit anything that could change a
    // neighbor's beliefs. On a never-used edge the first send always happens,
    // so it must carry exactly what the receiver already believes.
    const ExportPolicy& exp = st.profile->export_for(v);
    for (const auto& nb : st.graph->neighbors(v)) {
      Route exported = exp.permit(nb.id, ns.selection) ? ns.selection : Route{};
      DirectedEdge edge{v, nb.id};
      auto sent_it = st.ever_sent.find(edge);
      if (sent_it != st.ever_sent.end() && sent_it->second) {
        if (st.last_sent.at(edge) != exported) return false;
      } else {
        auto peer_it = st.nodes.find(nb.id);
        if (peer_it != st.nodes.end() && peer_it->second.rib_in.at(v) != exported) return false;
      }
    }
  }
  return true;
}

std::optional<ScheduleEvent> FairRandomSchedule::next(const SimulationState& st) {
  int W = window_ > 0 ? window_ : 4 * static_cast<int>(st.graph->node_count());
  // Age counters; channel counters only advance while nonempty.
  for (NodeId n : st.graph->nodes()) node_idle_[n]++;
  for (const auto& [edge, ch] : st.channels)
    if (!ch.in_flight.empty())
      channel_idle_[edge]++;
    else
      channel_idle_[edge] = 0;

  // Serve the most starved entity first.
  NodeId starved_node = -1;
  int worst = W - 1;
  for (const auto& [n, idle] : node_idle_) {
    if (idle > worst) {
      worst = idle;
      starved_node = n;
    }
  }
  DirectedEdge starved_edge{-1, -1};
  int worst_edge = W - 1;
  for (const auto& [e, idle] : channel_idle_) {
    if (idle > worst_edge) {
      worst_edge = idle;
      starved_edge = e;
    }
  }
  if (starved_edge.first >= 0 && worst_edge >= worst) {
    channel_idle_[starved_edge] = 0;
    const auto& q = st.channels.at(starved_edge).in_flight;
    uint64_t idx = q.empty() ? 0 : q[rng_.below(q.size())].send_index;
    return ScheduleEvent{DeliverEvent{starved_edge.first, starved_edge.second, idx}};
  }
  if (starved_node >= 0) {
    node_idle_[starved_node] = 0;
    return ScheduleEvent{ActivateEvent{{starved_node}}};
  }

  // Otherwise random: deliveries and activations in even measure.
  std::vector<DirectedEdge> nonempty;
  for (const auto& [edge, ch] : st.channels)
    if (!ch.in_flight.empty()) nonempty.push_back(edge);
  bool deliver = !nonempty.empty() && rng_.chance(1, 2);
  if (deliver) {
    DirectedEdge e = nonempty[rng_.below(nonempty.size())];
    const auto& q = st.channels.at(e).in_flight;
    uint64_t idx = q[rng_.below(q.size())].send_index;
    channel_idle_[e] = 0;
    return ScheduleEvent{DeliverEvent{e.first, e.second, idx}};
  }
  std::vector<NodeId> set;
  for (NodeId n : st.graph->nodes())
    if (rng_.chance(1, 3)) set.push_back(n);
  if (set.empty()) {
    auto& all = st.graph->nodes();
    auto it = all.begin();
    std::advance(it, rng_.below(all.size()));
    set.push_back(*it);
  }
  for (NodeId n : set) node_idle_[n] = 0;
  return ScheduleEvent{ActivateEvent{std::move(set)}};
}

std::optional<ScheduleEvent> SynchronousSchedule::next(const SimulationState& st) {
  if (queue_.empty()) {
    for (const auto& [edge, ch] : st.channels) {
      for (const auto& m : ch.in_flight)
        queue_.push_back(DeliverEvent{edge.first, edge.second, m.send_index});
    }
    std::vector<NodeId> all(st.graph->nodes().begin(), st.graph->nodes().end());
    queue_.push_back(ActivateEvent{std::move(all)});
  }
  ScheduleEvent ev = queue_.front();
  queue_.pop_front();
  return ev;
}

std::string describe_event(const ScheduleEvent& ev) {
  std::ostringstream os;
  if (const auto* act = std::get_if<ActivateEvent>(&ev)) {
    os << "act ";
    for (size_t i = 0; i < act->nodes.size(); ++i) {
      if (i) os << ',';
      os << act->nodes[i];
    }
  } else if (const auto* dlv = std::get_if<DeliverEvent>(&ev)) {
    os << "dlv " << dlv->from << "->" << dlv->to << " " << dlv->send_index;
  } else if (const auto* drop = std::get_if<DropEvent>(&ev)) {
    os << "drop " << drop->from << "->" << drop->to << " " << drop->send_index;
  }
  return os.str();
}

Trace run(SimulationState& st, Schedule& schedule, const RunOptions& options) {
  Trace trace;
  // Cycle detection bookkeeping: configuration hash -> (event index, ordinal),
  // snapshots kept in visit order for witness reconstruction.
  std::unordered_map<uint64_t, std::pair<uint64_t, size_t>> seen;
  std::vector<std::map<NodeId, Route>> snapshots;

  auto selections_of = [&]() {
    std::map<NodeId, Route> sel;
    for (const auto& [n, ns] : st.nodes) sel[n] = ns.selection;
    return sel;
  };

  uint64_t executed = 0;
  int stride = std::max(1, options.quiescence_check_stride);
  while (true) {
    if (options.stop_on_quiescence && executed % stride == 0 && detect_quiescence(st)) {
      trace.stop = StopReason::Quiescent;
      trace.quiescent = true;
      break;
    }
    if (executed >= options.events_max) {
      trace.stop = StopReason::EventBudget;
      break;
    }
    if (options.rounds_max > 0 && st.ledger.completed() >= options.rounds_max) {
      trace.stop = StopReason::RoundBudget;
      break;
    }
    if (options.detect_cycles && schedule.supports_cycle_detection() && schedule.at_boundary()) {
      uint64_t h = hash_combine(st.config_hash(), schedule.state_hash());
      auto it = seen.find(h);
      if (it != seen.end()) {
        size_t first_ord = it->second.second;
        OscillationWitness w;
        w.cycle_start_event = it->second.first;
        w.cycle_length_events = st.clock - it->second.first;
        for (size_t k = first_ord; k < snapshots.size(); ++k)
          w.cycle_selections.push_back(snapshots[k]);
        if (w.cycle_selections.empty()) w.cycle_selections.push_back(selections_of());
        const auto& base = w.cycle_selections.front();
        for (const auto& conf : w.cycle_selections)
          for (const auto& [n, r] : conf)
            if (base.at(n) != r) w.changing_nodes.insert(n);
        if (w.changing_nodes.empty()) {
          trace.stop = StopReason::Quiescent;  // recurring configuration, constant selections
          trace.quiescent = true;
        } else {
          trace.witness = std::move(w);
          trace.stop = StopReason::OscillationFound;
        }
        break;
      }
      seen.emplace(h, std::make_pair(st.clock, snapshots.size()));
      snapshots.push_back(selections_of());
    }
    auto ev = schedule.next(st);
    if (!ev) {
      trace.stop = StopReason::ScheduleExhausted;
      break;
    }
    if (options.record_event_log) {
      std::ostringstream os;
      os << "t=" << st.clock + 1 << " ev=" << describe_event(*ev)
         << " round=" << st.ledger.current_round();
      trace.event_log.push_back(os.str());
    }
    step(st, *ev);
    st.rolling_hash = hash_combine(st.rolling_hash, schedule.state_hash());
    executed++;
  }

  trace.changes = st.changes;
  trace.events = executed;
  trace.rounds_completed = st.ledger.completed();
  trace.stabilization_round = st.stabilization_round();
  trace.final_selections = selections_of();
  trace.last_change_round = st.last_change_round;
  trace.trace_hash = st.rolling_hash;
  if (!trace.quiescent && trace.stop != StopReason::OscillationFound)
    trace.quiescent = detect_quiescence(st);
  return trace;
}

std::optional<OscillationWitness> detect_oscillation(const Trace& trace) { return trace.witness; }

}  // namespace frasim
