#pragma once

// Minimum-weight spanning arborescence (Chu-Liu/Edmonds) with recovery of
// the chosen edges through every cycle contraction.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ptz {

struct WeightedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;
};

/// Out-arborescence: every node except the root has exactly one parent and
/// is reachable from the root.
struct Arborescence {
  std::size_t root = 0;
  double weight = 0.0;
  std::vector<std::size_t> parent;  // parent[root] == root
  std::vector<WeightedEdge> edges;
};

namespace detail {

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Returns indices into `edges` forming a minimum out-arborescence, or
// nothing when some node cannot be reached from the root.
inline std::optional<std::vector<std::size_t>> edmonds(std::size_t n, const std::vector<WeightedEdge>& edges,
                                                       std::size_t root) {
  std::vector<std::size_t> best(n, kNone);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& E = edges[e];
    if (E.to == root || E.from == E.to) continue;
    if (best[E.to] == kNone || E.weight < edges[best[E.to]].weight) best[E.to] = e;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (v != root && best[v] == kNone) return std::nullopt;

  // Find the cycles formed by the cheapest incoming edges.
  std::vector<std::size_t> comp(n, kNone), mark(n, kNone);
  std::size_t cycles = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t x = v;
    while (x != root && mark[x] == kNone && comp[x] == kNone) {
      mark[x] = v;
      x = edges[best[x]].from;
    }
    if (x != root && mark[x] == v && comp[x] == kNone) {
      std::size_t y = x;
      do {
        comp[y] = cycles;
        y = edges[best[y]].from;
      } while (y != x);
      ++cycles;
    }
  }
  if (cycles == 0) {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < n; ++v)
      if (v != root) out.push_back(best[v]);
    return out;
  }

  std::vector<char> in_cycle(n, 0);
  for (std::size_t v = 0; v < n; ++v) in_cycle[v] = comp[v] != kNone;
  std::size_t next = cycles;
  for (std::size_t v = 0; v < n; ++v)
    if (comp[v] == kNone) comp[v] = next++;

  std::vector<WeightedEdge> contracted;
  std::vector<std::size_t> origin;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& E = edges[e];
    const auto u = comp[E.from], w = comp[E.to];
    if (u == w) continue;
    double weight = E.weight;
    if (in_cycle[E.to]) weight -= edges[best[E.to]].weight;
    contracted.push_back({u, w, weight});
    origin.push_back(e);
  }
  auto sub = edmonds(next, contracted, comp[root]);
  if (!sub) return std::nullopt;

  std::vector<std::size_t> out;
  std::vector<std::size_t> entered(cycles, kNone);  // head vertex through which each cycle is entered
  for (auto ce : *sub) {
    const auto e = origin[ce];
    out.push_back(e);
    if (in_cycle[edges[e].to]) entered[comp[edges[e].to]] = edges[e].to;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (in_cycle[v] && entered[comp[v]] != v) out.push_back(best[v]);
  return out;
}

}  // namespace detail

/// Minimum out-arborescence of the directed graph on n nodes rooted at
/// `root`; nothing when some node is unreachable from the root.
inline std::optional<Arborescence> min_arborescence(std::size_t n, const std::vector<WeightedEdge>& edges,
                                                    std::size_t root) {
  if (root >= n) throw std::out_of_range("arborescence root out of range");
  for (const auto& e : edges)
    if (e.from >= n || e.to >= n) throw std::out_of_range("edge endpoint out of range");
  auto chosen = detail::edmonds(n, edges, root);
  if (!chosen) return std::nullopt;
  Arborescence a;
  a.root = root;
  a.parent.assign(n, detail::kNone);
  a.parent[root] = root;
  for (auto e : *chosen) {
    a.edges.push_back(edges[e]);
    a.parent[edges[e].to] = edges[e].from;
    a.weight += edges[e].weight;
  }
  std::sort(a.edges.begin(), a.edges.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return std::pair(x.to, x.from) < std::pair(y.to, y.from); });
  return a;
}

/// Minimum in-tree: every node has a path to `root`. Reverses the edges,
/// solves the out-tree problem and reverses the result back.
inline std::optional<Arborescence> min_in_arborescence(std::size_t n, const std::vector<WeightedEdge>& edges,
                                                       std::size_t root) {
  std::vector<WeightedEdge> reversed;
  reversed.reserve(edges.size());
  for (const auto& e : edges) reversed.push_back({e.to, e.from, e.weight});
  auto out = min_arborescence(n, reversed, root);
  if (!out) return std::nullopt;
  for (auto& e : out->edges) std::swap(e.from, e.to);
  // parent[] now names, for each node, the next node on its path to the root.
  std::fill(out->parent.begin(), out->parent.end(), detail::kNone);
  out->parent[root] = root;
  for (const auto& e : out->edges) out->parent[e.from] = e.to;
  std::sort(out->edges.begin(), out->edges.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return std::pair(x.from, x.to) < std::pair(y.from, y.to); });
  return out;
}

}  // namespace ptz
