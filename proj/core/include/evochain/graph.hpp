#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evochain {

using NodeIndex = std::uint32_t;

struct Arc {
  NodeIndex source = 0;
  NodeIndex target = 0;
  double weight = 0.0;

  bool operator==(const Arc&) const = default;
};

/// Weighted directed graph of one time frame, stored in compressed sparse
/// row form. Node indices follow the lexicographic order of node names, so
/// anything sorted by index is also sorted by name.
///
/// Invariants: no self-loops, every arc weight is positive, arcs are unique
/// per ordered pair and sorted by (source, target).
class SnapshotGraph {
 public:
  SnapshotGraph() = default;

  std::size_t node_count() const noexcept { return names_.size(); }
  std::size_t arc_count() const noexcept { return arcs_.size(); }

  const std::string& node_name(NodeIndex node) const { return names_[node]; }
  std::span<const std::string> node_names() const noexcept { return names_; }
  std::optional<NodeIndex> find_node(std::string_view name) const;

  std::span<const Arc> arcs() const noexcept { return arcs_; }
  std::span<const Arc> out_arcs(NodeIndex node) const;
  /// Sources of arcs entering `node`, ascending.
  std::span<const NodeIndex> in_sources(NodeIndex node) const;

  bool has_arc(NodeIndex source, NodeIndex target) const;
  /// 0 when the arc is absent.
  double arc_weight(NodeIndex source, NodeIndex target) const;
  double out_weight(NodeIndex node) const;
  double total_weight() const;

  /// Undirected simple view: sorted neighbor lists where an arc in either
  /// direction makes two nodes adjacent.
  std::vector<std::vector<NodeIndex>> undirected_adjacency() const;

  bool operator==(const SnapshotGraph& other) const {
    return names_ == other.names_ && arcs_ == other.arcs_;
  }

 private:
  friend class GraphBuilder;

  std::vector<std::string> names_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeIndex> in_sources_;
};

/// Accumulates named arcs. Parallel arcs are merged by summing weights;
/// self-loops and zero-weight arcs are dropped without registering nodes.
class GraphBuilder {
 public:
  /// Registers a node even if it ends up without arcs.
  void add_node(std::string_view name);
  void add_arc(std::string_view source, std::string_view target, double weight = 1.0);

  SnapshotGraph build() const;

 private:
  std::set<std::string, std::less<>> nodes_;
  std::map<std::pair<std::string, std::string>, double> arcs_;
};

}  // namespace evochain
