#include "attack.hpp"

namespace frasim {

FixedRouteAttack::FixedRouteAttack(const AsGraph* graph, NodeId attacker)
    : graph_(graph), attacker_(attacker) {
  if (!graph->is_attacker(attacker))
    throw std::invalid_argument("node " + std::to_string(attacker) + " is not in the attacker set");
}

void FixedRouteAttack::check_neighbor(NodeId neighbor) const {
  if (!graph_->adjacent(attacker_, neighbor))
    throw std::invalid_argument("node " + std::to_string(neighbor) + " is not adjacent to attacker " +
                                std::to_string(attacker_));
}

void FixedRouteAttack::set_announcement(NodeId neighbor, Route content) {
  check_neighbor(neighbor);
  if (content.empty() || content.last() != graph_->destination())
    throw std::invalid_argument("attacker announcements must end at the destination");
  announcements_[neighbor] = std::move(content);
}

void FixedRouteAttack::set_silence(NodeId neighbor) {
  check_neighbor(neighbor);
  announcements_[neighbor] = std::nullopt;
}

std::optional<Route> FixedRouteAttack::announcement_for(NodeId neighbor) const {
  check_neighbor(neighbor);
  auto it = announcements_.find(neighbor);
  if (it == announcements_.end()) return std::nullopt;
  return it->second;
}

uint64_t FixedRouteAttack::content_hash() const {
  uint64_t h = mix64(static_cast<uint64_t>(attacker_) + 0xa77ac4);
  for (const auto& [nb, ann] : announcements_) {
    h = hash_combine(h, static_cast<uint64_t>(nb));
    h = ann ? hash_combine(h, hash_route(1, *ann)) : hash_combine(h, 0xdead);
  }
  return h;
}

FixedRouteAttack prefix_hijack(NodeId attacker, const AsGraph& graph) {
  FixedRouteAttack a(&graph, attacker);
  for (const auto& n : graph.neighbors(attacker))
    a.set_announcement(n.id, Route{attacker, graph.destination()});
  return a;
}

}  // namespace frasim
