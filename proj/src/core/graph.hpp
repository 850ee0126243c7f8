#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "types.hpp"

namespace frasim {

// Edge labels. P2C edges are oriented (customer -> provider); Peer and Plain
// are symmetric. Plain is only meaningful in shortest-path systems.
enum class EdgeKind { P2C, Peer, Plain };

enum class Mode { ShortestPath, Commercial };

// Relationship of a neighbor as seen from a given node.
enum class Role { Customer, Provider, Peer, Unlabeled };

struct Edge {
  NodeId a = 0;  // for P2C: a is the customer, b the provider
  NodeId b = 0;
  EdgeKind kind = EdgeKind::Plain;
};

struct NeighborView {
  NodeId id = 0;
  Role role = Role::Unlabeled;
  bool is_destination = false;
};

struct Violation {
  enum class Kind { Structural, CustomerProviderCycle, UnlabeledEdgeInCommercial, AttackerDestination };
  Kind kind;
  std::string message;
  std::vector<NodeId> nodes;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_text() const;
};

// Undirected AS-level topology with business relationships, a unique
// destination and the set of fixed-route attackers. Immutable once built
// (construction via add_* calls, then treated read-only).
class AsGraph {
 public:
  void add_node(NodeId id, bool attacker = false);
  void set_destination(NodeId id);
  // For P2C, u is the customer and v the provider.
  void add_edge(NodeId u, NodeId v, EdgeKind kind);

  bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
  bool is_attacker(NodeId id) const { return attackers_.count(id) != 0; }
  bool is_destination(NodeId id) const { return has_destination_ && destination_ == id; }
  NodeId destination() const;
  const std::set<NodeId>& nodes() const { return nodes_; }
  const std::set<NodeId>& attackers() const { return attackers_; }
  const std::vector<Edge>& edges() const { return edges_; }
  size_t node_count() const { return nodes_.size(); }
  // Non-attacker nodes other than d; the ones that rank and select.
  std::vector<NodeId> source_nodes() const;

  bool adjacent(NodeId u, NodeId v) const;
  const std::vector<NeighborView>& neighbors(NodeId id) const;
  // Role of `other` as seen from `node`; throws if not adjacent.
  Role role_of(NodeId node, NodeId other) const;

  ValidationReport validate(Mode mode) const;
  // Length in edges of the longest directed path in the customer->provider
  // DAG; precondition: no customer-provider cycle.
  int hierarchy_depth() const;

 private:
  void check_node(NodeId id) const;

  std::set<NodeId> nodes_;
  std::set<NodeId> attackers_;
  std::vector<Edge> edges_;
  std::map<NodeId, std::vector<NeighborView>> adj_;
  NodeId destination_ = 0;
  bool has_destination_ = false;
};

}  // namespace frasim
