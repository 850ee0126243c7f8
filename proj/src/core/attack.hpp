#pragma once

#include <map>
#include <optional>

#include "graph.hpp"
#include "types.hpp"

namespace frasim {

// One attacker's constant per-neighbor announcements. A missing entry or an
// explicit silence means the attacker never sends anything on that edge (no
// withdrawal either). Announced sequences are unrestricted beyond ending at
// the destination: they need not be simple, exist in the graph, or start
// with the attacker's own id.
class FixedRouteAttack {
 public:
  FixedRouteAttack() = default;
  FixedRouteAttack(const AsGraph* graph, NodeId attacker);

  NodeId attacker() const { return attacker_; }

  void set_announcement(NodeId neighbor, Route content);
  void set_silence(NodeId neighbor);

  // The constant value toward a neighbor; nullopt = silence.
  std::optional<Route> announcement_for(NodeId neighbor) const;

  uint64_t content_hash() const;

 private:
  void check_neighbor(NodeId neighbor) const;
  const AsGraph* graph_ = nullptr;
  NodeId attacker_ = 0;
  std::map<NodeId, std::optional<Route>> announcements_;  // nullopt = silence
};

// All attacks of one scenario, keyed by attacker id. Every attacker in the
// graph must have an entry (possibly all-silent).
struct AttackSet {
  std::map<NodeId, FixedRouteAttack> attacks;

  const FixedRouteAttack* find(NodeId attacker) const {
    auto it = attacks.find(attacker);
    return it == attacks.end() ? nullptr : &it->second;
  }
  void add(FixedRouteAttack a) { attacks[a.attacker()] = std::move(a); }
};

// The classic attack: claim adjacency to d toward every neighbor.
FixedRouteAttack prefix_hijack(NodeId attacker, const AsGraph& graph);

}  // namespace frasim
