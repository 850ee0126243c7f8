#include "oracle.hpp"

#include <algorithm>
#include <functional>

namespace frasim {

namespace {

constexpr size_t kMaxOracleNodes = 16;

// Export checks along a complete route: for every consecutive pair (j,k)
// with k closer to d and both within [from, upto) positions, the suffix at k
// must be exportable by k toward j.
bool exports_hold(const AsGraph& graph, const PolicyProfile& profile, const Route& r,
                  size_t first, size_t last) {
  for (size_t pos = first; pos + 1 <= last; ++pos) {
    NodeId j = r.hops[pos];
    NodeId k = r.hops[pos + 1];
    Route suffix = r.suffix_from(k);
    if (graph.is_destination(k)) continue;  // d exports its self-announcement to everyone
    if (!profile.export_for(k).permit(j, suffix)) return false;
  }
  return true;
}

void simple_paths_dfs(const AsGraph& graph, NodeId cur, NodeId target,
                      const std::set<NodeId>& forbidden, std::vector<NodeId>& path,
                      std::set<NodeId>& on_path, std::vector<std::vector<NodeId>>& out) {
  if (cur == target) {
    out.push_back(path);
    return;
  }
  for (const auto& nb : graph.neighbors(cur)) {
    if (on_path.count(nb.id) || forbidden.count(nb.id)) continue;
    path.push_back(nb.id);
    on_path.insert(nb.id);
    simple_paths_dfs(graph, nb.id, target, forbidden, path, on_path, out);
    on_path.erase(nb.id);
    path.pop_back();
  }
}

std::vector<std::vector<NodeId>> simple_paths(const AsGraph& graph, NodeId from, NodeId to,
                                              const std::set<NodeId>& forbidden) {
  std::vector<std::vector<NodeId>> out;
  if (forbidden.count(from) || forbidden.count(to)) return out;
  std::vector<NodeId> path{from};
  std::set<NodeId> on_path{from};
  simple_paths_dfs(graph, from, to, forbidden, path, on_path, out);
  return out;
}

int count_attackers(const AsGraph& graph, const Route& r) {
  int c = 0;
  for (NodeId n : r.hops)
    if (graph.is_attacker(n)) c++;
  return c;
}

}  // namespace

std::vector<Route> perceivable_routes(const AsGraph& graph, const PolicyProfile& profile,
                                      const AttackSet& attacks, NodeId owner) {
  if (graph.is_attacker(owner) || graph.is_destination(owner))
    throw std::invalid_argument("perceivable routes are defined for non-attacker source nodes");
  if (graph.node_count() > kMaxOracleNodes)
    throw std::invalid_argument("graph too large for explicit perceivable-route materialization");

  std::vector<Route> out;
  NodeId d = graph.destination();

  // Condition 1: attacker-free real routes, export-permitted hop by hop.
  std::set<NodeId> forbidden(graph.attackers().begin(), graph.attackers().end());
  for (auto& hops : simple_paths(graph, owner, d, forbidden)) {
    Route r(hops);
    if (exports_hold(graph, profile, r, 0, r.hops.size() - 1)) out.push_back(std::move(r));
  }

  // Condition 2: a real attacker-free prefix reaching some neighbor of an
  // attacker, continued by that attacker's fixed announcement.
  for (NodeId a : graph.attackers()) {
    const FixedRouteAttack* atk = attacks.find(a);
    if (!atk) continue;
    for (const auto& nb : graph.neighbors(a)) {
      auto ann = atk->announcement_for(nb.id);
      if (!ann) continue;
      // The suffix at the attacker equals the announcement, so it must start
      // with the attacker itself; exactly one attacker may appear on a route.
      if (ann->hops.front() != a) continue;
      if (!ann->is_simple()) continue;
      if (count_attackers(graph, *ann) != 1) continue;
      if (graph.is_destination(nb.id)) continue;  // d at the predecessor would repeat d
      std::set<NodeId> blocked(graph.attackers().begin(), graph.attackers().end());
      blocked.erase(a);
      for (NodeId n : ann->hops) blocked.insert(n);
      blocked.insert(d);
      if (blocked.count(nb.id) || blocked.count(owner)) continue;
      std::set<NodeId> prefix_forbidden = blocked;
      prefix_forbidden.insert(a);
      for (auto& prefix : simple_paths(graph, owner, nb.id, prefix_forbidden)) {
        std::vector<NodeId> hops = prefix;
        hops.insert(hops.end(), ann->hops.begin(), ann->hops.end());
        Route r(std::move(hops));
        if (!r.is_simple()) continue;
        if (exports_hold(graph, profile, r, 0, prefix.size() - 1)) out.push_back(std::move(r));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<NodeId, std::vector<Route>> all_perceivable(const AsGraph& graph,
                                                     const PolicyProfile& profile,
                                                     const AttackSet& attacks) {
  std::map<NodeId, std::vector<Route>> prs;
  for (NodeId n : graph.source_nodes()) prs[n] = perceivable_routes(graph, profile, attacks, n);
  return prs;
}

BestPerceivable best_perceivable(const std::vector<Route>& prs, const RankingFunction& ranking) {
  BestPerceivable bp;
  if (prs.empty()) return bp;
  for (const Route& r : prs) {
    if (bp.best.empty() || ranking.strictly_better(r, bp.best)) bp.best = r;
  }
  for (const Route& r : prs) {
    if (ranking.compare(r, bp.best) == Cmp::Tied) bp.routes.push_back(r);
  }
  bp.next_hop = bp.best.next_hop();
  for (const Route& r : bp.routes) {
    if (r.next_hop() != bp.next_hop)
      throw std::logic_error("best perceivable routes with differing next hops: ranking violates the tie rule");
  }
  return bp;
}

namespace {

// Shared machinery for FSR and FR: live perceivable sets, the fixed set I,
// pruning and empty-set absorption.
class Workspace {
 public:
  Workspace(const AsGraph& graph, const PolicyProfile& profile, const AttackSet& attacks,
            uint64_t seed)
      : graph_(graph), profile_(profile), attacks_(attacks), seed_(seed) {
    prs_ = all_perceivable(graph, profile, attacks);
    in_i_.insert(graph.attackers().begin(), graph.attackers().end());
    in_i_.insert(graph.destination());
    // seeded permutation for "select an arbitrary node"
    std::vector<NodeId> ids = graph.source_nodes();
    SplitMix64 rng(mix64(seed ^ 0x0f1ce));
    for (size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
    for (size_t i = 0; i < ids.size(); ++i) perm_[ids[i]] = i;
    result_.assignment.selection_seed = seed;
  }

  bool fixed(NodeId n) const { return result_.assignment.fixed.count(n) != 0; }
  bool in_i(NodeId n) const { return in_i_.count(n) != 0; }
  const std::vector<Route>& prs(NodeId n) const { return prs_.at(n); }
  uint64_t perm(NodeId n) const { return perm_.at(n); }
  OracleResult& result() { return result_; }

  std::vector<NodeId> unfixed_sources() const {
    std::vector<NodeId> out;
    for (const auto& [n, _] : prs_)
      if (!fixed(n)) out.push_back(n);
    return out;
  }

  Route best_of(NodeId n) const {
    const RankingFunction& rank = profile_.ranking_for(n);
    Route best;
    for (const Route& r : prs_.at(n))
      if (best.empty() || rank.strictly_better(r, best)) best = r;
    return best;
  }

  RouteClass class_of_best(NodeId n) const {
    Route b = best_of(n);
    if (b.empty()) return RouteClass::Unknown;
    return classify_route(graph_, b);
  }

  void fix(NodeId n, Route route, FixPhase phase, int bound) {
    FixedEntry e;
    e.route = route;
    e.order = next_order_++;
    e.phase = phase;
    e.predicted_round_bound = bound;
    result_.assignment.fixed[n] = std::move(e);
    in_i_.insert(n);
    prune(n, route, phase);
  }

  // Remove, from every set, routes whose real part runs through `n` but is
  // inconsistent with what n was fixed to or with n's exports. Occurrences
  // inside an attacker-announced tail are frozen attack content, not subject
  // to pruning. The peer-phase rule (drop peer and customer routes through a
  // peer/provider-fixed node) is implied by the export checks at
  // materialization; it is applied here all the same.
  void prune(NodeId n, const Route& fixed_route, FixPhase phase) {
    for (auto& [owner, set] : prs_) {
      if (owner == n) {
        if (fixed_route.empty())
          set.clear();
        else
          set.assign(1, fixed_route);
        continue;
      }
      std::vector<Route> kept;
      kept.reserve(set.size());
      for (Route& r : set) {
        int idx = r.index_of(n);
        bool real = idx >= 0;
        if (real) {
          for (int p = 0; p < idx; ++p)
            if (graph_.is_attacker(r.hops[p])) real = false;  // n sits in the bogus tail
          if (real && graph_.is_attacker(n)) real = false;
        }
        bool remove = false;
        if (real && idx > 0) {
          Route suffix = r.suffix_from(n);
          if (suffix != fixed_route) remove = true;
          if (!remove && !profile_.export_for(n).permit(r.hops[idx - 1], fixed_route))
            remove = true;
          if (!remove && (phase == FixPhase::FPeeR || phase == FixPhase::FPrvR)) {
            RouteClass c = classify_route(graph_, r);
            if (c == RouteClass::Peer || c == RouteClass::Customer) remove = true;
          }
        }
        if (!remove) kept.push_back(std::move(r));
      }
      set = std::move(kept);
    }
  }

  void absorb_empty(FixPhase phase, int bound) {
    bool again = true;
    while (again) {
      again = false;
      for (const auto& [n, set] : prs_) {
        if (fixed(n) || !set.empty()) continue;
        fix(n, Route{}, phase, bound);
        again = true;
        break;
      }
    }
  }

  // Lemma walks: follow best-route next hops through unfixed nodes of the
  // given class until one's next hop lies in the fixed set.
  NodeId walk(NodeId start, RouteClass klass) {
    std::set<NodeId> visited;
    NodeId cur = start;
    size_t guard = graph_.node_count() + 1;
    while (guard-- > 0) {
      if (visited.count(cur)) break;
      visited.insert(cur);
      Route best = best_of(cur);
      if (best.empty() || classify_route(graph_, best) != klass)
        throw std::logic_error("witness walk reached a node without the expected route class");
      NodeId nxt = *best.next_hop();
      if (in_i(nxt)) {
        result_.witness_checks++;
        if (fixed(cur) || classify_route(graph_, best) != klass || !in_i(nxt))
          result_.witness_failures++;
        return cur;
      }
      cur = nxt;
    }
    result_.walk_overflows++;
    throw std::logic_error("witness walk formed a cycle: customer-provider hierarchy violated");
  }

  const AsGraph& graph_;
  const PolicyProfile& profile_;
  const AttackSet& attacks_;
  uint64_t seed_;
  std::map<NodeId, std::vector<Route>> prs_;
  std::set<NodeId> in_i_;
  std::map<NodeId, uint64_t> perm_;
  OracleResult result_;
  int next_order_ = 0;
};

}  // namespace

OracleResult fsr(const AsGraph& graph, const PolicyProfile& profile, const AttackSet& attacks,
                 uint64_t selection_seed) {
  Workspace ws(graph, profile, attacks, selection_seed);
  int n_sources = static_cast<int>(graph.node_count()) - 1;  // whole-system bound for empty-fixed
  ws.absorb_empty(FixPhase::FSR, n_sources);
  while (true) {
    // candidates: unfixed nodes with nonempty sets whose best next hop is fixed
    NodeId pick = -1;
    int pick_len = 0;
    Route pick_route;
    for (NodeId n : ws.unfixed_sources()) {
      if (ws.prs(n).empty()) continue;
      Route best = ws.best_of(n);
      NodeId nxt = *best.next_hop();
      if (!ws.in_i(nxt)) continue;
      int len = best.length();
      if (pick < 0 || len < pick_len ||
          (len == pick_len && ws.perm(n) < ws.perm(pick))) {
        pick = n;
        pick_len = len;
        pick_route = best;
      }
    }
    if (pick < 0) {
      if (!ws.unfixed_sources().empty())
        throw std::logic_error("fix-shortest-routes stalled: no eligible node");
      break;
    }
    ws.fix(pick, pick_route, FixPhase::FSR, pick_len);
    ws.absorb_empty(FixPhase::FSR, n_sources);
  }
  ws.result().assignment.hierarchy_depth = -1;
  return ws.result();
}

OracleResult fr(const AsGraph& graph, const PolicyProfile& profile, const AttackSet& attacks,
                uint64_t selection_seed) {
  Workspace ws(graph, profile, attacks, selection_seed);
  int x = graph.hierarchy_depth();
  int global_bound = 2 * x + 1;
  ws.result().assignment.hierarchy_depth = x;
  ws.absorb_empty(FixPhase::FCR, global_bound);

  // Fix Customer Routes
  while (true) {
    NodeId start = -1;
    for (NodeId n : ws.unfixed_sources()) {
      if (ws.prs(n).empty()) continue;
      if (ws.class_of_best(n) != RouteClass::Customer) continue;
      if (start < 0 || ws.perm(n) < ws.perm(start)) start = n;
    }
    if (start < 0) break;
    NodeId j = ws.walk(start, RouteClass::Customer);
    ws.fix(j, ws.best_of(j), FixPhase::FCR, std::max(1, x));
    ws.absorb_empty(FixPhase::FCR, global_bound);
  }

  // Fix Peer Routes: a surviving peer route's next hop is already fixed
  // (it exported a customer-class suffix), so selection is direct.
  while (true) {
    NodeId pick = -1;
    for (NodeId n : ws.unfixed_sources()) {
      if (ws.prs(n).empty()) continue;
      if (ws.class_of_best(n) != RouteClass::Peer) continue;
      Route best = ws.best_of(n);
      if (!ws.in_i(*best.next_hop())) continue;
      if (pick < 0 || ws.perm(n) < ws.perm(pick)) pick = n;
    }
    if (pick < 0) {
      for (NodeId n : ws.unfixed_sources())
        if (!ws.prs(n).empty() && ws.class_of_best(n) == RouteClass::Peer)
          throw std::logic_error("peer-class node with unfixed next hop after customer phase");
      break;
    }
    ws.fix(pick, ws.best_of(pick), FixPhase::FPeeR, x + 1);
    ws.absorb_empty(FixPhase::FPeeR, global_bound);
  }

  // Fix Provider Routes
  while (true) {
    NodeId start = -1;
    for (NodeId n : ws.unfixed_sources()) {
      if (ws.prs(n).empty()) continue;
      if (ws.class_of_best(n) != RouteClass::Provider) continue;
      if (start < 0 || ws.perm(n) < ws.perm(start)) start = n;
    }
    if (start < 0) break;
    NodeId j = ws.walk(start, RouteClass::Provider);
    ws.fix(j, ws.best_of(j), FixPhase::FPrvR, global_bound);
    ws.absorb_empty(FixPhase::FPrvR, global_bound);
  }

  if (!ws.unfixed_sources().empty())
    throw std::logic_error("fix-routes left nodes unfixed: model violation");
  return ws.result();
}

namespace {

NodeId witness_common(const AsGraph& graph, const PolicyProfile& profile, const AttackSet& attacks,
                      const FixedAssignment& fixed, RouteClass klass) {
  Workspace ws(graph, profile, attacks, fixed.selection_seed);
  // Replay fixings in order to reconstruct the mid-algorithm sets.
  std::vector<std::pair<int, NodeId>> order;
  for (const auto& [n, e] : fixed.fixed) order.push_back({e.order, n});
  std::sort(order.begin(), order.end());
  for (const auto& [o, n] : order) {
    const FixedEntry& e = fixed.fixed.at(n);
    ws.fix(n, e.route, e.phase, e.predicted_round_bound);
  }
  NodeId start = -1;
  for (NodeId n : ws.unfixed_sources()) {
    if (ws.prs(n).empty()) continue;
    if (ws.class_of_best(n) != klass) continue;
    if (start < 0 || ws.perm(n) < ws.perm(start)) start = n;
  }
  if (start < 0)
    throw std::invalid_argument("no unfixed node with a best route of the requested class");
  return ws.walk(start, klass);
}

}  // namespace

NodeId existence_witness_customer(const AsGraph& graph, const PolicyProfile& profile,
                                  const AttackSet& attacks, const FixedAssignment& fixed) {
  return witness_common(graph, profile, attacks, fixed, RouteClass::Customer);
}

NodeId existence_witness_provider(const AsGraph& graph, const PolicyProfile& profile,
                                  const AttackSet& attacks, const FixedAssignment& fixed) {
  return witness_common(graph, profile, attacks, fixed, RouteClass::Provider);
}

}  // namespace frasim
