#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "attack.hpp"
#include "graph.hpp"
#include "policy.hpp"
#include "types.hpp"

namespace frasim {

struct UpdateMessage {
  NodeId sender = 0;
  NodeId receiver = 0;
  Route content;  // empty = explicit empty-route announcement
  uint64_t send_index = 0;
};

struct ActivateEvent {
  std::vector<NodeId> nodes;
};
// send_index selects the in-flight message; 0 = oldest in flight.
struct DeliverEvent {
  NodeId from = 0, to = 0;
  uint64_t send_index = 0;
};
struct DropEvent {
  NodeId from = 0, to = 0;
  uint64_t send_index = 0;
};
using ScheduleEvent = std::variant<ActivateEvent, DeliverEvent, DropEvent>;

using DirectedEdge = std::pair<NodeId, NodeId>;

struct Channel {
  std::deque<UpdateMessage> in_flight;
  uint64_t next_seq = 1;
  uint64_t capacity_drops = 0;
};

// Tracks asynchronous round boundaries, greedy-earliest: every directed edge
// with in-transit messages at round start must deliver its newest such
// message (or a newer one) to the receiver, and every node must be activated
// after its receipts complete; the round closes at the first event where
// both hold for all nodes. A stale delivery does not count as a receipt: the
// receipt has to reflect the sender's state at round start, which is what
// the per-round stabilization arguments rely on.
class RoundLedger {
 public:
  void start(const std::set<NodeId>& all_nodes,
             const std::map<DirectedEdge, Channel>& channels);
  void on_deliver(DirectedEdge edge, uint64_t send_index);
  void on_activate(NodeId node);
  // True when the in-progress round just closed; caller restarts.
  bool closed() const { return pending_nodes_ == 0; }
  int completed() const { return completed_; }
  int current_round() const { return completed_ + 1; }
  void mark_closed_and_count() { ++completed_; }

 private:
  int completed_ = 0;
  std::map<DirectedEdge, uint64_t> required_seq_;  // 0 once received
  std::map<NodeId, int> remaining_;                // obligated in-edges not yet received
  std::map<NodeId, bool> done_;                    // activated after all receipts
  int pending_nodes_ = 0;
};

struct EngineOptions {
  size_t channel_capacity = 8;
  // Place d's self-announcement, the attackers' fixed announcements and the
  // non-attackers' initial exported values in flight. Disabled only by
  // degenerate-state unit tests.
  bool seed_initial_messages = true;
};

// Arbitrary starting point: selections and believed announcements may be
// bogus; anything not named starts empty.
struct InitialConfig {
  std::map<NodeId, Route> selections;
  std::map<NodeId, std::map<NodeId, Route>> rib;
};

struct NodeState {
  Route selection;
  std::optional<NodeId> selection_learned_from;
  std::map<NodeId, Route> rib_in;
  std::map<NodeId, uint64_t> rib_seq;
  std::vector<UpdateMessage> pending;
};

class SimulationState {
 public:
  const AsGraph* graph = nullptr;
  const PolicyProfile* profile = nullptr;
  const AttackSet* attacks = nullptr;
  EngineOptions options;

  std::map<NodeId, NodeState> nodes;  // non-attacker sources only
  std::map<DirectedEdge, Channel> channels;
  std::map<DirectedEdge, Route> last_sent;  // per directed edge, sources and d
  std::map<DirectedEdge, bool> ever_sent;
  uint64_t clock = 0;
  RoundLedger ledger;

  std::map<NodeId, int> last_change_round;
  uint64_t messages_sent = 0;
  uint64_t messages_dropped = 0;
  // Attacker sends are constant per directed edge; a violation marks a bug.
  std::map<DirectedEdge, uint64_t> attacker_sent_hash;
  bool attacker_constancy_ok = true;

  // Selection-changes observed this run, kept small: (clock, round, node, route).
  struct Change {
    uint64_t clock;
    int round;
    NodeId node;
    Route selection;
  };
  std::vector<Change> changes;
  uint64_t rolling_hash = 0x243f6a8885a308d3ULL;

  void enqueue(NodeId from, NodeId to, Route content);
  // Normalized configuration hash: selections, effective rib/pending values,
  // ordered channel contents and last-sent values; send counters excluded so
  // recurring configurations hash equally.
  uint64_t config_hash() const;
  int stabilization_round() const;
};

SimulationState initialize(const AsGraph& graph, const PolicyProfile& profile,
                           const AttackSet& attacks, const InitialConfig& init = {},
                           const EngineOptions& options = {});

// Applies one event; malformed events (unknown nodes/edges) throw and leave
// the state unchanged. Returns true if any selection changed.
bool step(SimulationState& state, const ScheduleEvent& event);

bool detect_quiescence(const SimulationState& state);

class Schedule {
 public:
  virtual ~Schedule() = default;
  virtual std::optional<ScheduleEvent> next(const SimulationState& state) = 0;
  virtual uint64_t state_hash() const = 0;
  // Cycle detection is sound only for deterministic generators; sampling
  // happens at boundary points.
  virtual bool supports_cycle_detection() const { return false; }
  virtual bool at_boundary() const { return true; }
};

// Random events with fairness enforcement: within a bounded window every
// node activates and every nonempty channel delivers. No FIFO assumption:
// deliveries pick an arbitrary in-flight message.
class FairRandomSchedule : public Schedule {
 public:
  explicit FairRandomSchedule(uint64_t seed, int window = 0) : rng_(mix64(seed ^ 0xFA12)), window_(window) {}
  std::optional<ScheduleEvent> next(const SimulationState& state) override;
  uint64_t state_hash() const override { return rng_.state; }

 private:
  SplitMix64 rng_;
  int window_;  // 0 = 4*|V| default
  std::map<NodeId, int> node_idle_;
  std::map<DirectedEdge, int> channel_idle_;
};

// Deliver everything, then activate everyone; one asynchronous round per
// macro-step. Deterministic, so usable for cycle detection.
class SynchronousSchedule : public Schedule {
 public:
  std::optional<ScheduleEvent> next(const SimulationState& state) override;
  uint64_t state_hash() const override { return queue_.size(); }
  bool supports_cycle_detection() const override { return true; }
  bool at_boundary() const override { return queue_.empty(); }

 private:
  std::deque<ScheduleEvent> queue_;
};

class FileSchedule : public Schedule {
 public:
  explicit FileSchedule(std::vector<ScheduleEvent> events) : events_(std::move(events)) {}
  std::optional<ScheduleEvent> next(const SimulationState&) override {
    if (pos_ >= events_.size()) return std::nullopt;
    return events_[pos_++];
  }
  uint64_t state_hash() const override { return pos_; }

 private:
  std::vector<ScheduleEvent> events_;
  size_t pos_ = 0;
};

enum class StopReason {
  Quiescent,
  EventBudget,
  RoundBudget,
  ScheduleExhausted,
  OscillationFound
};

struct OscillationWitness {
  uint64_t cycle_start_event = 0;
  uint64_t cycle_length_events = 0;
  // Distinct configurations around the cycle.
  std::vector<std::map<NodeId, Route>> cycle_selections;
  std::set<NodeId> changing_nodes;
};

struct RunOptions {
  uint64_t events_max = 500000;
  int rounds_max = 0;  // 0 = unlimited
  bool stop_on_quiescence = true;
  bool detect_cycles = false;
  bool record_event_log = false;
  int quiescence_check_stride = 1;
};

struct Trace {
  std::vector<SimulationState::Change> changes;
  std::vector<std::string> event_log;
  uint64_t events = 0;
  int rounds_completed = 0;
  int stabilization_round = 0;
  bool quiescent = false;
  StopReason stop = StopReason::EventBudget;
  std::map<NodeId, Route> final_selections;
  std::map<NodeId, int> last_change_round;
  uint64_t trace_hash = 0;
  std::optional<OscillationWitness> witness;
};

Trace run(SimulationState& state, Schedule& schedule, const RunOptions& options = {});

inline int round_count(const Trace& t) { return t.rounds_completed; }

// Cycle of configurations under a deterministic schedule, or nothing.
std::optional<OscillationWitness> detect_oscillation(const Trace& trace);

std::string describe_event(const ScheduleEvent& ev);

}  // namespace frasim
