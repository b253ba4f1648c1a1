#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eonsim {

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

/// Directed link id: 2 * link for travel a->b, 2 * link + 1 for b->a.
using DirectedLinkIndex = std::size_t;

struct EdgeSpec {
  std::string a;
  std::string b;
  double length_km = 0.0;
};

struct Link {
  NodeIndex a = 0;
  NodeIndex b = 0;
  double length_km = 0.0;
};

class TopologyError : public std::runtime_error {
 public:
  enum class Kind {
    kParse,
    kEmpty,
    kSelfLoop,
    kDuplicateEdge,
    kNonPositiveLength,
    kDisconnected,
    kUnknownNode,
    kSameEndpoints,
  };

  TopologyError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// A loopless route through the topology. `hops` holds direction-resolved
/// link ids so the grid can address the fibers actually traversed.
struct Path {
  std::vector<NodeIndex> nodes;
  std::vector<DirectedLinkIndex> hops;
  double length_km = 0.0;

  std::size_t hop_count() const noexcept { return hops.size(); }
};

/// Ascending length, then lexicographic node sequence.
bool path_less(const Path& lhs, const Path& rhs);

/// Undirected, connected, weighted graph. Immutable after construction.
///
/// Node names are opaque strings. Dense indices follow the sorted order of
/// the names, numerically when every name is an integer, so "lexicographic
/// node sequence" means the natural order a reader expects (2 < 10).
class Topology {
 public:
  const std::vector<std::string>& node_names() const noexcept { return names_; }
  const std::vector<Link>& links() const noexcept { return links_; }

  std::size_t node_count() const noexcept { return names_.size(); }
  std::size_t link_count() const noexcept { return links_.size(); }
  std::size_t directed_link_count() const noexcept { return 2 * links_.size(); }

  std::optional<NodeIndex> find_node(std::string_view name) const;
  /// Throws TopologyError(kUnknownNode).
  NodeIndex node(std::string_view name) const;
  const std::string& name(NodeIndex index) const { return names_.at(index); }

  std::optional<LinkIndex> find_link(NodeIndex u, NodeIndex v) const;
  /// Length of the undirected link u-v; throws if absent.
  double length(std::string_view u, std::string_view v) const;

  /// Directed id for travelling u -> v over an existing link.
  DirectedLinkIndex directed_link(NodeIndex u, NodeIndex v) const;
  std::pair<NodeIndex, NodeIndex> directed_endpoints(DirectedLinkIndex id) const;

  struct Neighbor {
    NodeIndex node;
    LinkIndex link;
  };
  /// Neighbors sorted by node index.
  std::span<const Neighbor> neighbors(NodeIndex u) const { return adjacency_.at(u); }

  /// Builds a Path from a node sequence, validating every hop.
  Path make_path(std::span<const NodeIndex> nodes) const;

  std::vector<EdgeSpec> edge_specs() const;

 private:
  friend Topology load_topology(std::span<const EdgeSpec> edges);

  std::vector<std::string> names_;
  std::vector<Link> links_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Validates the edge list. Nodes are exactly the endpoints that appear.
Topology load_topology(std::span<const EdgeSpec> edges);

/// Parses `<node_a> <node_b> <length_km>` lines; `#` starts a comment line.
Topology parse_topology(std::istream& in);
Topology load_topology_file(const std::string& path);

void write_topology(std::ostream& out, const Topology& topology);

/// 14-node, 22-link NSFNet with link lengths in km.
Topology nsfnet_preset();

/// Up to k loopless shortest paths (Yen), ordered by path_less.
std::vector<Path> yen_k_shortest(const Topology& topology, NodeIndex source,
                                 NodeIndex destination, std::size_t k);

/// Every simple path, ordered by path_less.
std::vector<Path> all_paths_sorted(const Topology& topology, NodeIndex source,
                                   NodeIndex destination);

/// Shortest path under path_less ordering (Dijkstra with a lexicographic
/// walk over the shortest-distance DAG).
std::optional<Path> shortest_path(const Topology& topology, NodeIndex source,
                                  NodeIndex destination);

/// `std::nullopt` stands for k = infinity (every simple path).
using PathLimit = std::optional<std::size_t>;

std::string to_string(PathLimit k);
PathLimit parse_path_limit(std::string_view text);

/// Candidate paths for every ordered (source, destination) pair.
class CandidatePaths {
 public:
  CandidatePaths() = default;
  CandidatePaths(std::size_t node_count, PathLimit k,
                 std::vector<std::vector<Path>> by_pair);

  std::size_t node_count() const noexcept { return node_count_; }
  PathLimit k() const noexcept { return k_; }

  /// Dense index over ordered pairs with source != destination.
  std::size_t pair_index(NodeIndex source, NodeIndex destination) const;
  std::pair<NodeIndex, NodeIndex> pair_endpoints(std::size_t pair) const;
  std::size_t pair_count() const noexcept { return by_pair_.size(); }

  std::span<const Path> paths(std::size_t pair) const { return by_pair_.at(pair); }
  std::span<const Path> paths(NodeIndex source, NodeIndex destination) const {
    return paths(pair_index(source, destination));
  }

  /// Number of candidates per pair, in pair order.
  std::vector<std::size_t> path_counts() const;

 private:
  std::size_t node_count_ = 0;
  PathLimit k_;
  std::vector<std::vector<Path>> by_pair_;
};

CandidatePaths build_candidate_paths(const Topology& topology, PathLimit k);

}  // namespace eonsim
