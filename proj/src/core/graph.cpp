#include "graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace frasim {

std::string to_string(const Route& r) {
  if (r.empty()) return "none";
  std::ostringstream os;
  for (size_t i = 0; i < r.hops.size(); ++i) {
    if (i) os << ',';
    os << r.hops[i];
  }
  return os.str();
}

std::string ValidationReport::to_text() const {
  if (ok()) return "ok\n";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << v.message;
    if (!v.nodes.empty()) {
      os << " [";
      for (size_t i = 0; i < v.nodes.size(); ++i) {
        if (i) os << ',';
        os << v.nodes[i];
      }
      os << ']';
    }
    os << '\n';
  }
  return os.str();
}

void AsGraph::add_node(NodeId id, bool attacker) {
  if (id < 0) throw std::invalid_argument("node ids must be non-negative");
  nodes_.insert(id);
  adj_.try_emplace(id);
  if (attacker) {
    if (has_destination_ && destination_ == id)
      throw std::invalid_argument("destination cannot be an attacker");
    attackers_.insert(id);
  }
}

void AsGraph::set_destination(NodeId id) {
  if (has_destination_ && destination_ != id)
    throw std::invalid_argument("destination already set");
  if (attackers_.count(id)) throw std::invalid_argument("destination cannot be an attacker");
  add_node(id);
  destination_ = id;
  has_destination_ = true;
}

NodeId AsGraph::destination() const {
  if (!has_destination_) throw std::logic_error("no destination set");
  return destination_;
}

void AsGraph::add_edge(NodeId u, NodeId v, EdgeKind kind) {
  check_node(u);
  check_node(v);
  if (u == v) throw std::invalid_argument("self-loop rejected");
  if (adjacent(u, v)) throw std::invalid_argument("duplicate edge rejected");
  edges_.push_back(Edge{u, v, kind});
  auto push = [&](NodeId from, NodeId to, Role role) {
    adj_[from].push_back(NeighborView{to, role, is_destination(to)});
  };
  switch (kind) {
    case EdgeKind::P2C:  // u customer of v
      push(u, v, Role::Provider);
      push(v, u, Role::Customer);
      break;
    case EdgeKind::Peer:
      push(u, v, Role::Peer);
      push(v, u, Role::Peer);
      break;
    case EdgeKind::Plain:
      push(u, v, Role::Unlabeled);
      push(v, u, Role::Unlabeled);
      break;
  }
}

void AsGraph::check_node(NodeId id) const {
  if (!has_node(id)) throw std::invalid_argument("unknown node " + std::to_string(id));
}

bool AsGraph::adjacent(NodeId u, NodeId v) const {
  auto it = adj_.find(u);
  if (it == adj_.end()) return false;
  for (const auto& n : it->second)
    if (n.id == v) return true;
  return false;
}

const std::vector<NeighborView>& AsGraph::neighbors(NodeId id) const {
  auto it = adj_.find(id);
  if (it == adj_.end()) throw std::invalid_argument("unknown node " + std::to_string(id));
  return it->second;
}

Role AsGraph::role_of(NodeId node, NodeId other) const {
  for (const auto& n : neighbors(node))
    if (n.id == other) return n.role;
  throw std::invalid_argument("nodes not adjacent");
}

ValidationReport AsGraph::validate(Mode mode) const {
  ValidationReport report;
  if (!has_destination_)
    report.violations.push_back(
        {Violation::Kind::Structural, "no destination declared", {}});
  for (NodeId a : attackers_) {
    if (has_destination_ && a == destination_)
      report.violations.push_back(
          {Violation::Kind::AttackerDestination, "destination is marked attacker", {a}});
  }
  if (mode == Mode::Commercial) {
    for (const auto& e : edges_) {
      if (e.kind == EdgeKind::Plain)
        report.violations.push_back({Violation::Kind::UnlabeledEdgeInCommercial,
                                     "unlabeled edge in commercial mode",
                                     {e.a, e.b}});
    }
  }
  // Customer->provider cycle check (any mode: a labeled graph must be sane).
  std::map<NodeId, int> color;  // 0 unvisited, 1 on stack, 2 done
  std::map<NodeId, std::vector<NodeId>> up;
  for (const auto& e : edges_)
    if (e.kind == EdgeKind::P2C) up[e.a].push_back(e.b);
  std::vector<NodeId> stack;
  bool cycle_reported = false;
  std::function<bool(NodeId)> dfs = [&](NodeId u) -> bool {
    color[u] = 1;
    stack.push_back(u);
    for (NodeId v : up[u]) {
      if (color[v] == 1) {
        // report the cycle found on the stack
        std::vector<NodeId> cyc;
        auto it = std::find(stack.begin(), stack.end(), v);
        cyc.assign(it, stack.end());
        report.violations.push_back(
            {Violation::Kind::CustomerProviderCycle, "customer-provider cycle", cyc});
        return true;
      }
      if (color[v] == 0 && dfs(v)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (NodeId n : nodes_) {
    if (cycle_reported) break;
    if (color[n] == 0 && dfs(n)) cycle_reported = true;
  }
  return report;
}

int AsGraph::hierarchy_depth() const {
  std::map<NodeId, std::vector<NodeId>> up;
  std::map<NodeId, int> indeg;
  for (NodeId n : nodes_) indeg[n] = 0;
  for (const auto& e : edges_) {
    if (e.kind != EdgeKind::P2C) continue;
    up[e.a].push_back(e.b);
    indeg[e.b]++;
  }
  // longest-path DP over the DAG, topological order
  std::vector<NodeId> order;
  std::vector<NodeId> q;
  for (auto& [n, d] : indeg)
    if (d == 0) q.push_back(n);
  std::map<NodeId, int> longest;
  while (!q.empty()) {
    NodeId u = q.back();
    q.pop_back();
    order.push_back(u);
    for (NodeId v : up[u]) {
      longest[v] = std::max(longest[v], longest[u] + 1);
      if (--indeg[v] == 0) q.push_back(v);
    }
  }
  if (order.size() != nodes_.size())
    throw std::logic_error("hierarchy_depth called on graph with customer-provider cycle");
  int best = 0;
  for (auto& [n, l] : longest) best = std::max(best, l);
  return best;
}

std::vector<NodeId> AsGraph::source_nodes() const {
  std::vector<NodeId> out;
  for (NodeId n : nodes_)
    if (!is_attacker(n) && !(has_destination_ && n == destination_)) out.push_back(n);
  return out;
}

}  // namespace frasim
