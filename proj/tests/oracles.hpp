#pragma once

// Slow, obviously-correct reference implementations used to check the
// optimized code. Nothing here calls the routine it is checking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "eonsim/grid.hpp"
#include "eonsim/topology.hpp"

namespace oracle {

using eonsim::NodeIndex;

struct Graph {
  std::size_t n = 0;
  // adj[u] = (v, length)
  std::vector<std::vector<std::pair<NodeIndex, double>>> adj;
};

inline Graph graph_of(const eonsim::Topology& topo) {
  Graph g;
  g.n = topo.node_count();
  g.adj.resize(g.n);
  for (const auto& e : topo.edge_specs()) {
    const NodeIndex a = topo.node(e.a);
    const NodeIndex b = topo.node(e.b);
    g.adj[a].emplace_back(b, e.length_km);
    g.adj[b].emplace_back(a, e.length_km);
  }
  return g;
}

struct SimplePath {
  double length = 0.0;
  std::vector<NodeIndex> nodes;
};

// Every simple path by exhaustive DFS, sorted by (length, node sequence).
// Lengths in the test topologies are integers, so exact comparison is safe.
inline std::vector<SimplePath> all_simple_paths(const Graph& g, NodeIndex s, NodeIndex d) {
  std::vector<SimplePath> out;
  std::vector<NodeIndex> stack{s};
  std::vector<bool> seen(g.n, false);
  seen[s] = true;
  auto rec = [&](auto&& self, NodeIndex u, double len) -> void {
    if (u == d) {
      out.push_back({len, stack});
      return;
    }
    for (const auto& [v, w] : g.adj[u]) {
      if (seen[v]) continue;
      seen[v] = true;
      stack.push_back(v);
      self(self, v, len + w);
      stack.pop_back();
      seen[v] = false;
    }
  };
  rec(rec, s, 0.0);
  std::sort(out.begin(), out.end(), [](const SimplePath& a, const SimplePath& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.nodes < b.nodes;
  });
  return out;
}

// Textbook O(n^2) Dijkstra distances.
inline std::vector<double> dijkstra(const Graph& g, NodeIndex s) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.n, inf);
  std::vector<bool> done(g.n, false);
  dist[s] = 0.0;
  for (std::size_t iter = 0; iter < g.n; ++iter) {
    NodeIndex u = g.n;
    for (NodeIndex v = 0; v < g.n; ++v) {
      if (!done[v] && (u == g.n || dist[v] < dist[u])) u = v;
    }
    if (u == g.n || dist[u] == inf) break;
    done[u] = true;
    for (const auto& [v, w] : g.adj[u]) dist[v] = std::min(dist[v], dist[u] + w);
  }
  return dist;
}

// Lexicographically smallest feasible (core, start) by scanning every cell.
inline std::optional<eonsim::SlotPlacement> first_fit_scan(
    const eonsim::SpectrumGrid& grid, const std::vector<eonsim::DirectedLinkIndex>& hops,
    std::size_t width) {
  if (hops.empty() || width > grid.slots_per_core()) return std::nullopt;
  for (std::size_t core = 0; core < grid.cores_per_link(); ++core) {
    for (std::size_t start = 0; start + width <= grid.slots_per_core(); ++start) {
      bool free = true;
      for (auto h : hops) {
        for (std::size_t s = start; s < start + width && free; ++s) {
          if (grid.occupied(h, core, s)) free = false;
        }
      }
      if (free) return eonsim::SlotPlacement{core, start};
    }
  }
  return std::nullopt;
}

// Erlang-B blocking for `servers` servers at offered load `a`, by the
// standard recursion B(0) = 1, B(n) = a B(n-1) / (n + a B(n-1)).
inline double erlang_b(std::size_t servers, double a) {
  double b = 1.0;
  for (std::size_t n = 1; n <= servers; ++n) b = a * b / (static_cast<double>(n) + a * b);
  return b;
}

// Direct evaluation of Q + c * sqrt(ln t / N); untried actions first.
inline std::size_t ucb_argmax(const std::vector<double>& q, const std::vector<std::uint64_t>& n,
                              double c) {
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == 0) return i;
  }
  double t = 0;
  for (auto x : n) t += static_cast<double>(x);
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = q[i] + c * std::sqrt(std::log(t) / static_cast<double>(n[i]));
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

}  // namespace oracle
