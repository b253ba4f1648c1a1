#include "eonsim/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

namespace eonsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::optional<long long> as_integer(std::string_view s) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::vector<std::string> sorted_names(std::vector<std::string> names) {
  const bool numeric = std::all_of(names.begin(), names.end(),
                                   [](const std::string& n) { return as_integer(n).has_value(); });
  if (numeric) {
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      return *as_integer(a) < *as_integer(b);
    });
  } else {
    std::sort(names.begin(), names.end());
  }
  return names;
}

[[noreturn]] void fail(TopologyError::Kind kind, const std::string& message) {
  throw TopologyError(kind, message);
}

// Lexicographically smallest shortest path from `from` to `to` in the graph
// with `blocked_nodes` and `blocked_links` removed.
std::optional<std::vector<NodeIndex>> lex_shortest_nodes(const Topology& topo, NodeIndex from,
                                                         NodeIndex to,
                                                         const std::vector<char>& blocked_nodes,
                                                         const std::vector<char>& blocked_links) {
  const std::size_t n = topo.node_count();
  std::vector<double> dist(n, kInf);
  using Item = std::pair<double, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[to] = 0.0;
  heap.emplace(0.0, to);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& nb : topo.neighbors(u)) {
      if (blocked_nodes[nb.node] || blocked_links[nb.link]) continue;
      const double nd = d + topo.links()[nb.link].length_km;
      if (nd < dist[nb.node]) {
        dist[nb.node] = nd;
        heap.emplace(nd, nb.node);
      }
    }
  }
  if (dist[from] == kInf) return std::nullopt;

  std::vector<NodeIndex> nodes{from};
  NodeIndex u = from;
  while (u != to) {
    std::optional<NodeIndex> next;
    for (const auto& nb : topo.neighbors(u)) {
      if (blocked_nodes[nb.node] || blocked_links[nb.link] || dist[nb.node] == kInf) continue;
      if (nearly_equal(dist[nb.node] + topo.links()[nb.link].length_km, dist[u])) {
        next = nb.node;
        break;  // neighbors are index-sorted
      }
    }
    if (!next) return std::nullopt;
    nodes.push_back(*next);
    u = *next;
  }
  return nodes;
}

void check_endpoints(const Topology& topo, NodeIndex source, NodeIndex destination) {
  if (source >= topo.node_count() || destination >= topo.node_count()) {
    fail(TopologyError::Kind::kUnknownNode, "node index out of range");
  }
  if (source == destination) {
    fail(TopologyError::Kind::kSameEndpoints, "source and destination are the same node");
  }
}

}  // namespace

bool path_less(const Path& lhs, const Path& rhs) {
  if (!nearly_equal(lhs.length_km, rhs.length_km)) return lhs.length_km < rhs.length_km;
  return lhs.nodes < rhs.nodes;
}

std::optional<NodeIndex> Topology::find_node(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<NodeIndex>(it - names_.begin());
}

NodeIndex Topology::node(std::string_view name) const {
  if (auto idx = find_node(name)) return *idx;
  fail(TopologyError::Kind::kUnknownNode, "unknown node '" + std::string(name) + "'");
}

std::optional<LinkIndex> Topology::find_link(NodeIndex u, NodeIndex v) const {
  if (u >= adjacency_.size()) return std::nullopt;
  for (const auto& nb : adjacency_[u]) {
    if (nb.node == v) return nb.link;
  }
  return std::nullopt;
}

double Topology::length(std::string_view u, std::string_view v) const {
  auto link = find_link(node(u), node(v));
  if (!link) {
    fail(TopologyError::Kind::kUnknownNode,
         "no link between '" + std::string(u) + "' and '" + std::string(v) + "'");
  }
  return links_[*link].length_km;
}

DirectedLinkIndex Topology::directed_link(NodeIndex u, NodeIndex v) const {
  auto link = find_link(u, v);
  if (!link) fail(TopologyError::Kind::kUnknownNode, "hop is not a topology link");
  return 2 * *link + (links_[*link].a == u ? 0 : 1);
}

std::pair<NodeIndex, NodeIndex> Topology::directed_endpoints(DirectedLinkIndex id) const {
  const Link& link = links_.at(id / 2);
  return id % 2 == 0 ? std::pair{link.a, link.b} : std::pair{link.b, link.a};
}

Path Topology::make_path(std::span<const NodeIndex> nodes) const {
  if (nodes.size() < 2) fail(TopologyError::Kind::kSameEndpoints, "path needs two nodes");
  std::vector<char> seen(node_count(), 0);
  Path path;
  path.nodes.assign(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= node_count()) fail(TopologyError::Kind::kUnknownNode, "node out of range");
    if (seen[nodes[i]]++) fail(TopologyError::Kind::kParse, "path revisits a node");
    if (i + 1 < nodes.size()) {
      const DirectedLinkIndex hop = directed_link(nodes[i], nodes[i + 1]);
      path.hops.push_back(hop);
      path.length_km += links_[hop / 2].length_km;
    }
  }
  return path;
}

std::vector<EdgeSpec> Topology::edge_specs() const {
  std::vector<EdgeSpec> out;
  out.reserve(links_.size());
  for (const Link& l : links_) out.push_back({names_[l.a], names_[l.b], l.length_km});
  return out;
}

Topology load_topology(std::span<const EdgeSpec> edges) {
  using Kind = TopologyError::Kind;
  if (edges.empty()) fail(Kind::kEmpty, "topology has no links");

  std::vector<std::string> names;
  for (const EdgeSpec& e : edges) {
    if (e.a == e.b) fail(Kind::kSelfLoop, "self-loop at node '" + e.a + "'");
    if (!(e.length_km > 0.0) || !std::isfinite(e.length_km)) {
      fail(Kind::kNonPositiveLength, "link " + e.a + "-" + e.b + " has non-positive length");
    }
    names.push_back(e.a);
    names.push_back(e.b);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  Topology topo;
  topo.names_ = sorted_names(std::move(names));
  topo.adjacency_.resize(topo.names_.size());

  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (const EdgeSpec& e : edges) {
    NodeIndex a = topo.node(e.a);
    NodeIndex b = topo.node(e.b);
    if (!seen.emplace(std::min(a, b), std::max(a, b)).second) {
      fail(Kind::kDuplicateEdge, "duplicate link " + e.a + "-" + e.b);
    }
    const LinkIndex id = topo.links_.size();
    topo.links_.push_back({a, b, e.length_km});
    topo.adjacency_[a].push_back({b, id});
    topo.adjacency_[b].push_back({a, id});
  }
  for (auto& adj : topo.adjacency_) {
    std::sort(adj.begin(), adj.end(), [](const auto& x, const auto& y) { return x.node < y.node; });
  }

  std::vector<char> reached(topo.node_count(), 0);
  std::vector<NodeIndex> stack{0};
  reached[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    NodeIndex u = stack.back();
    stack.pop_back();
    for (const auto& nb : topo.adjacency_[u]) {
      if (!reached[nb.node]) {
        reached[nb.node] = 1;
        ++count;
        stack.push_back(nb.node);
      }
    }
  }
  if (count != topo.node_count()) fail(Kind::kDisconnected, "topology is not connected");
  return topo;
}

Topology parse_topology(std::istream& in) {
  std::vector<EdgeSpec> edges;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    EdgeSpec e;
    std::string length, extra;
    if (!(fields >> e.a >> e.b >> length) || (fields >> extra)) {
      fail(TopologyError::Kind::kParse,
           "line " + std::to_string(line_no) + ": expected '<node_a> <node_b> <length_km>'");
    }
    auto [ptr, ec] = std::from_chars(length.data(), length.data() + length.size(), e.length_km);
    if (ec != std::errc{} || ptr != length.data() + length.size()) {
      fail(TopologyError::Kind::kParse,
           "line " + std::to_string(line_no) + ": bad length '" + length + "'");
    }
    edges.push_back(std::move(e));
  }
  return load_topology(edges);
}

Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(TopologyError::Kind::kParse, "cannot open topology file '" + path + "'");
  return parse_topology(in);
}

void write_topology(std::ostream& out, const Topology& topology) {
  for (const EdgeSpec& e : topology.edge_specs()) {
    out << e.a << ' ' << e.b << ' ' << e.length_km << '\n';
  }
}

Topology nsfnet_preset() {
  static const EdgeSpec kEdges[] = {
      {"1", "2", 1000},  {"3", "2", 600},   {"3", "1", 1500},  {"2", "4", 700},
      {"5", "4", 600},   {"3", "6", 1800},  {"5", "6", 1200},  {"5", "7", 600},
      {"8", "7", 700},   {"9", "7", 1300},  {"9", "6", 1000},  {"12", "6", 1800},
      {"8", "10", 700},  {"9", "10", 700},  {"13", "10", 300}, {"14", "10", 300},
      {"14", "11", 700}, {"13", "11", 600}, {"13", "12", 300}, {"14", "12", 100},
      {"11", "4", 1900}, {"8", "1", 2400},
  };
  return load_topology(kEdges);
}

std::optional<Path> shortest_path(const Topology& topology, NodeIndex source,
                                  NodeIndex destination) {
  check_endpoints(topology, source, destination);
  std::vector<char> no_nodes(topology.node_count(), 0);
  std::vector<char> no_links(topology.link_count(), 0);
  auto nodes = lex_shortest_nodes(topology, source, destination, no_nodes, no_links);
  if (!nodes) return std::nullopt;
  return topology.make_path(*nodes);
}

std::vector<Path> yen_k_shortest(const Topology& topology, NodeIndex source,
                                 NodeIndex destination, std::size_t k) {
  check_endpoints(topology, source, destination);
  std::vector<Path> accepted;
  if (k == 0) return accepted;
  auto first = shortest_path(topology, source, destination);
  if (!first) return accepted;
  accepted.push_back(std::move(*first));

  auto by_order = [](const Path& a, const Path& b) { return path_less(a, b); };
  std::set<Path, decltype(by_order)> candidates(by_order);

  std::vector<char> blocked_nodes(topology.node_count());
  std::vector<char> blocked_links(topology.link_count());
  while (accepted.size() < k) {
    const Path& previous = accepted.back();
    for (std::size_t j = 0; j + 1 < previous.nodes.size(); ++j) {
      std::fill(blocked_nodes.begin(), blocked_nodes.end(), 0);
      std::fill(blocked_links.begin(), blocked_links.end(), 0);
      const NodeIndex spur = previous.nodes[j];
      auto root_begin = previous.nodes.begin();
      auto root_end = previous.nodes.begin() + static_cast<std::ptrdiff_t>(j + 1);

      for (const Path& p : accepted) {
        if (p.nodes.size() > j + 1 && std::equal(root_begin, root_end, p.nodes.begin())) {
          blocked_links[*topology.find_link(p.nodes[j], p.nodes[j + 1])] = 1;
        }
      }
      for (auto it = root_begin; it + 1 != root_end; ++it) blocked_nodes[*it] = 1;

      auto spur_nodes = lex_shortest_nodes(topology, spur, destination, blocked_nodes, blocked_links);
      if (!spur_nodes) continue;
      std::vector<NodeIndex> full(root_begin, root_end - 1);
      full.insert(full.end(), spur_nodes->begin(), spur_nodes->end());
      Path candidate = topology.make_path(full);
      const bool known = std::any_of(accepted.begin(), accepted.end(),
                                     [&](const Path& p) { return p.nodes == candidate.nodes; });
      if (!known) candidates.insert(std::move(candidate));
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

std::vector<Path> all_paths_sorted(const Topology& topology, NodeIndex source,
                                   NodeIndex destination) {
  check_endpoints(topology, source, destination);
  std::vector<Path> out;
  std::vector<char> on_path(topology.node_count(), 0);
  std::vector<NodeIndex> nodes{source};
  on_path[source] = 1;

  // Iterative DFS; each frame remembers the next neighbor slot to try.
  std::vector<std::size_t> cursor{0};
  while (!cursor.empty()) {
    const NodeIndex u = nodes.back();
    auto adj = topology.neighbors(u);
    if (u == destination || cursor.back() >= adj.size()) {
      if (u == destination) out.push_back(topology.make_path(nodes));
      on_path[u] = 0;
      nodes.pop_back();
      cursor.pop_back();
      continue;
    }
    const NodeIndex v = adj[cursor.back()++].node;
    if (on_path[v]) continue;
    on_path[v] = 1;
    nodes.push_back(v);
    cursor.push_back(0);
  }
  std::sort(out.begin(), out.end(), path_less);
  return out;
}

std::string to_string(PathLimit k) { return k ? std::to_string(*k) : "inf"; }

PathLimit parse_path_limit(std::string_view text) {
  if (text == "inf") return std::nullopt;
  auto value = as_integer(text);
  if (!value || *value < 1) {
    throw std::invalid_argument("k must be a positive integer or 'inf', got '" +
                                std::string(text) + "'");
  }
  return static_cast<std::size_t>(*value);
}

CandidatePaths::CandidatePaths(std::size_t node_count, PathLimit k,
                               std::vector<std::vector<Path>> by_pair)
    : node_count_(node_count), k_(k), by_pair_(std::move(by_pair)) {
  if (by_pair_.size() != node_count_ * (node_count_ - 1)) {
    throw std::invalid_argument("candidate table size does not match pair count");
  }
}

std::size_t CandidatePaths::pair_index(NodeIndex source, NodeIndex destination) const {
  if (source >= node_count_ || destination >= node_count_ || source == destination) {
    throw std::out_of_range("invalid source-destination pair");
  }
  return source * (node_count_ - 1) + (destination < source ? destination : destination - 1);
}

std::pair<NodeIndex, NodeIndex> CandidatePaths::pair_endpoints(std::size_t pair) const {
  const NodeIndex source = pair / (node_count_ - 1);
  NodeIndex destination = pair % (node_count_ - 1);
  if (destination >= source) ++destination;
  return {source, destination};
}

std::vector<std::size_t> CandidatePaths::path_counts() const {
  std::vector<std::size_t> counts;
  counts.reserve(by_pair_.size());
  for (const auto& paths : by_pair_) counts.push_back(paths.size());
  return counts;
}

CandidatePaths build_candidate_paths(const Topology& topology, PathLimit k) {
  const std::size_t n = topology.node_count();
  std::vector<std::vector<Path>> by_pair;
  by_pair.reserve(n * (n - 1));
  for (NodeIndex s = 0; s < n; ++s) {
    for (NodeIndex d = 0; d < n; ++d) {
      if (s == d) continue;
      by_pair.push_back(k ? yen_k_shortest(topology, s, d, *k) : all_paths_sorted(topology, s, d));
    }
  }
  return CandidatePaths(n, k, std::move(by_pair));
}

}  // namespace eonsim
