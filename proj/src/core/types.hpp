#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace frasim {

using NodeId = int;

// A route is the node sequence carried in an announcement: it starts at the
// owning node and ends at the destination. An empty hop list is the empty
// route (no route to the destination).
struct Route {
  std::vector<NodeId> hops;

  Route() = default;
  explicit Route(std::vector<NodeId> h) : hops(std::move(h)) {}
  Route(std::initializer_list<NodeId> h) : hops(h) {}

  bool empty() const { return hops.empty(); }
  // Hop count minus one; 0 for the empty route and for a bare "(d)".
  int length() const { return hops.empty() ? 0 : static_cast<int>(hops.size()) - 1; }
  NodeId owner() const {
    if (hops.empty()) throw std::logic_error("empty route has no owner");
    return hops.front();
  }
  NodeId last() const {
    if (hops.empty()) throw std::logic_error("empty route has no last hop");
    return hops.back();
  }
  std::optional<NodeId> next_hop() const {
    if (hops.size() < 2) return std::nullopt;
    return hops[1];
  }
  bool contains(NodeId n) const {
    for (NodeId h : hops)
      if (h == n) return true;
    return false;
  }
  // No repeated node id.
  bool is_simple() const {
    for (size_t i = 0; i < hops.size(); ++i)
      for (size_t j = i + 1; j < hops.size(); ++j)
        if (hops[i] == hops[j]) return false;
    return true;
  }
  int index_of(NodeId n) const {
    for (size_t i = 0; i < hops.size(); ++i)
      if (hops[i] == n) return static_cast<int>(i);
    return -1;
  }
  // Prefix ending at j (inclusive).
  Route prefix_to(NodeId j) const {
    int idx = index_of(j);
    if (idx < 0) throw std::invalid_argument("node not on route");
    return Route(std::vector<NodeId>(hops.begin(), hops.begin() + idx + 1));
  }
  // Suffix starting at j (inclusive).
  Route suffix_from(NodeId j) const {
    int idx = index_of(j);
    if (idx < 0) throw std::invalid_argument("node not on route");
    return Route(std::vector<NodeId>(hops.begin() + idx, hops.end()));
  }
  std::optional<NodeId> pred(NodeId j) const {
    int idx = index_of(j);
    if (idx < 0) throw std::invalid_argument("node not on route");
    if (idx == 0) return std::nullopt;
    return hops[idx - 1];
  }
  std::optional<NodeId> succ(NodeId j) const {
    int idx = index_of(j);
    if (idx < 0) throw std::invalid_argument("node not on route");
    if (idx + 1 >= static_cast<int>(hops.size())) return std::nullopt;
    return hops[idx + 1];
  }
  // Route seen by `node` after hearing this announcement.
  Route prepend(NodeId node) const {
    std::vector<NodeId> h;
    h.reserve(hops.size() + 1);
    h.push_back(node);
    h.insert(h.end(), hops.begin(), hops.end());
    return Route(std::move(h));
  }

  bool operator==(const Route& o) const { return hops == o.hops; }
  bool operator!=(const Route& o) const { return hops != o.hops; }
  bool operator<(const Route& o) const { return hops < o.hops; }  // lexicographic, for containers
};

std::string to_string(const Route& r);

// Deterministic, platform-independent mixing (std::hash is not portable
// across implementations, and seeded orderings must be reproducible).
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) { return mix64(h ^ mix64(v)); }

inline uint64_t hash_route(uint64_t seed, const Route& r) {
  uint64_t h = mix64(seed ^ 0x5eedf00dULL);
  h = hash_combine(h, r.hops.size());
  for (NodeId n : r.hops) h = hash_combine(h, static_cast<uint64_t>(n) + 0x10000);
  return h;
}

// Small counter-free PRNG used by schedules and generators; its whole state
// is one word, which keeps configuration hashing for cycle detection cheap.
struct SplitMix64 {
  uint64_t state = 0;
  explicit SplitMix64(uint64_t seed = 0) : state(seed) {}
  uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Unbiased enough for simulation purposes.
  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }
  bool chance(uint32_t num, uint32_t den) { return below(den) < num; }
};

}  // namespace frasim
