#include "policy.hpp"

#include <algorithm>
#include <climits>

namespace frasim {

RouteClass classify_route(const AsGraph& graph, const Route& route,
                          std::optional<NodeId> learned_from) {
  if (route.empty()) throw std::invalid_argument("cannot classify empty route");
  NodeId owner = route.owner();
  if (route.hops.size() == 1) {
    return graph.is_destination(owner) ? RouteClass::SelfDestination : RouteClass::Unknown;
  }
  NodeId second = route.hops[1];
  NodeId via = second;
  if (!graph.adjacent(owner, second)) {
    if (learned_from && graph.adjacent(owner, *learned_from))
      via = *learned_from;
    else
      return RouteClass::Unknown;
  }
  switch (graph.role_of(owner, via)) {
    case Role::Customer:
      return RouteClass::Customer;
    case Role::Provider:
      return RouteClass::Provider;
    case Role::Peer:
      return RouteClass::Peer;
    case Role::Unlabeled:
      // Reaching d over an unlabeled edge in a mixed experiment counts as a
      // customer route; commercial validation forbids this case outright.
      return RouteClass::Customer;
  }
  return RouteClass::Unknown;
}

RouteClass classify_route_strict(const AsGraph& graph, const Route& route) {
  if (route.empty()) throw std::invalid_argument("cannot classify empty route");
  if (route.hops.size() >= 2 && !graph.adjacent(route.owner(), route.hops[1]))
    throw std::invalid_argument("malformed route: second hop not adjacent to owner");
  return classify_route(graph, route);
}

RankingFunction::RankingFunction(const AsGraph* graph, NodeId owner, Flavor flavor,
                                 uint64_t tie_seed, IntraClassOrder intra,
                                 PeerPreference peer_pref)
    : graph_(graph),
      owner_(owner),
      flavor_(flavor),
      intra_(intra),
      peer_pref_(peer_pref),
      tie_seed_(tie_seed) {
  // Seeded permutation of the real neighbors; injective ranks guarantee that
  // preorder ties can only pair routes with one and the same next hop.
  std::vector<NodeId> ids;
  for (const auto& n : graph->neighbors(owner)) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  SplitMix64 rng(mix64(tie_seed ^ (static_cast<uint64_t>(owner) * 0x9e37ULL)));
  for (size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
  for (size_t i = 0; i < ids.size(); ++i) nh_rank_[ids[i]] = i;
}

RankingFunction::Key RankingFunction::key(const Route& r,
                                          std::optional<NodeId> learned_from) const {
  Key k{LONG_MAX, 0, 0, 0};
  for (size_t i = 0; i < pinned_.size(); ++i) {
    if (pinned_[i] == r) {
      k.pin = static_cast<long>(i);
      break;
    }
  }
  if (flavor_ == Flavor::Commercial) {
    switch (classify_route(*graph_, r, learned_from)) {
      case RouteClass::Customer:
      case RouteClass::SelfDestination:
        k.tier = 0;
        break;
      case RouteClass::Peer:
        k.tier = peer_pref_ == PeerPreference::PeerOverProvider ? 1 : 2;
        break;
      case RouteClass::Provider:
        k.tier = peer_pref_ == PeerPreference::PeerOverProvider ? 2 : 1;
        break;
      case RouteClass::Unknown:
        k.tier = 3;
        break;
    }
    if (intra_ == IntraClassOrder::PreferShorter) k.intra = r.length();
  } else {
    k.intra = r.length();
  }
  if (auto nh = r.next_hop()) {
    auto it = nh_rank_.find(*nh);
    k.nh = it != nh_rank_.end() ? it->second : (0x8000000000000000ULL | mix64(*nh));
  }
  return k;
}

uint64_t RankingFunction::tie_hash(const Route& r) const {
  return hash_route(mix64(tie_seed_ ^ 0x7b7b) ^ static_cast<uint64_t>(owner_), r);
}

Cmp RankingFunction::compare(const Route& a, const Route& b, std::optional<NodeId> learned_a,
                             std::optional<NodeId> learned_b) const {
  if (a.empty() && b.empty()) return Cmp::Tied;
  if (a.empty()) return Cmp::BBetter;
  if (b.empty()) return Cmp::ABetter;
  Key ka = key(a, learned_a), kb = key(b, learned_b);
  auto ta = std::tie(ka.pin, ka.tier, ka.intra, ka.nh);
  auto tb = std::tie(kb.pin, kb.tier, kb.intra, kb.nh);
  if (ta < tb) return Cmp::ABetter;
  if (tb < ta) return Cmp::BBetter;
  return Cmp::Tied;
}

bool RankingFunction::strictly_better(const Route& a, const Route& b,
                                      std::optional<NodeId> learned_a,
                                      std::optional<NodeId> learned_b) const {
  switch (compare(a, b, learned_a, learned_b)) {
    case Cmp::ABetter:
      return true;
    case Cmp::BBetter:
      return false;
    case Cmp::Tied:
      break;
  }
  if (a == b) return false;
  uint64_t ha = tie_hash(a), hb = tie_hash(b);
  if (ha != hb) return ha < hb;
  return a.hops < b.hops;
}

Cmp rank_compare(const RankingFunction& ranking, const Route& a, const Route& b) {
  if (!a.empty() && a.owner() != ranking.owner())
    throw std::invalid_argument("route not owned by ranking's node");
  if (!b.empty() && b.owner() != ranking.owner())
    throw std::invalid_argument("route not owned by ranking's node");
  return ranking.compare(a, b);
}

ExportPolicy::ExportPolicy(const AsGraph* graph, NodeId owner, Base base, uint64_t seed,
                           uint32_t allow_pct)
    : graph_(graph), owner_(owner), base_(base), seed_(seed), allow_pct_(allow_pct) {}

bool ExportPolicy::permit(NodeId neighbor, const Route& route) const {
  if (route.empty()) return true;
  for (const auto& rule : overrides_) {
    if (rule.neighbor != neighbor) continue;
    if (rule.all || rule.route == route) return rule.allow;
  }
  switch (base_) {
    case Base::AllowAll:
      return true;
    case Base::SeededSubset: {
      uint64_t h = hash_route(mix64(seed_) ^ (static_cast<uint64_t>(owner_) << 20) ^
                                  static_cast<uint64_t>(neighbor),
                              route);
      return h % 100 < allow_pct_;
    }
    case Base::Commercial: {
      if (graph_->role_of(owner_, neighbor) == Role::Customer) return true;
      RouteClass c = classify_route(*graph_, route);
      return c == RouteClass::Customer || c == RouteClass::SelfDestination;
    }
  }
  return false;
}

const RankingFunction& PolicyProfile::ranking_for(NodeId node) const {
  auto it = rankings.find(node);
  if (it == rankings.end())
    throw std::invalid_argument("no ranking for node " + std::to_string(node));
  return it->second;
}

const ExportPolicy& PolicyProfile::export_for(NodeId node) const {
  auto it = exports.find(node);
  if (it == exports.end())
    throw std::invalid_argument("no export policy for node " + std::to_string(node));
  return it->second;
}

bool PolicyProfile::permits(NodeId sender, NodeId receiver, const Route& route) const {
  if (graph->is_destination(sender)) return true;
  if (graph->is_attacker(sender)) return true;
  return export_for(sender).permit(receiver, route);
}

PolicyProfile make_shortest_path_profile(const AsGraph& graph, uint64_t tie_seed,
                                         uint32_t export_allow_pct) {
  auto report = graph.validate(Mode::ShortestPath);
  if (!report.ok())
    throw std::invalid_argument("graph invalid in shortest-path mode:\n" + report.to_text());
  PolicyProfile p;
  p.mode = ProfileMode::ShortestPath;
  p.graph = &graph;
  for (NodeId n : graph.source_nodes()) {
    p.rankings.emplace(n, RankingFunction(&graph, n, RankingFunction::Flavor::ShortestPath,
                                          tie_seed));
    p.exports.emplace(
        n, ExportPolicy(&graph, n,
                        export_allow_pct >= 100 ? ExportPolicy::Base::AllowAll
                                                : ExportPolicy::Base::SeededSubset,
                        tie_seed, export_allow_pct));
  }
  return p;
}

PolicyProfile make_commercial_profile(const AsGraph& graph, uint64_t tie_seed,
                                      RankingFunction::IntraClassOrder intra,
                                      RankingFunction::PeerPreference peer_pref) {
  auto report = graph.validate(Mode::Commercial);
  if (!report.ok())
    throw std::invalid_argument("graph invalid in commercial mode:\n" + report.to_text());
  PolicyProfile p;
  p.mode = ProfileMode::Commercial;
  p.graph = &graph;
  for (NodeId n : graph.source_nodes()) {
    p.rankings.emplace(n, RankingFunction(&graph, n, RankingFunction::Flavor::Commercial,
                                          tie_seed, intra, peer_pref));
    p.exports.emplace(n, ExportPolicy(&graph, n, ExportPolicy::Base::Commercial));
  }
  return p;
}

}  // namespace frasim
