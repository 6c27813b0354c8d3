#include "evochain/graph.hpp"

#include <algorithm>

#include "evochain/error.hpp"

namespace evochain {

std::optional<NodeIndex> SnapshotGraph::find_node(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<NodeIndex>(it - names_.begin());
}

std::span<const Arc> SnapshotGraph::out_arcs(NodeIndex node) const {
  return std::span<const Arc>(arcs_).subspan(out_offsets_[node],
                                             out_offsets_[node + 1] - out_offsets_[node]);
}

std::span<const NodeIndex> SnapshotGraph::in_sources(NodeIndex node) const {
  return std::span<const NodeIndex>(in_sources_)
      .subspan(in_offsets_[node], in_offsets_[node + 1] - in_offsets_[node]);
}

bool SnapshotGraph::has_arc(NodeIndex source, NodeIndex target) const {
  return arc_weight(source, target) > 0.0;
}

double SnapshotGraph::arc_weight(NodeIndex source, NodeIndex target) const {
  auto out = out_arcs(source);
  auto it = std::lower_bound(out.begin(), out.end(), target,
                             [](const Arc& arc, NodeIndex t) { return arc.target < t; });
  if (it == out.end() || it->target != target) return 0.0;
  return it->weight;
}

double SnapshotGraph::out_weight(NodeIndex node) const {
  double sum = 0.0;
  for (const Arc& arc : out_arcs(node)) sum += arc.weight;
  return sum;
}

double SnapshotGraph::total_weight() const {
  double sum = 0.0;
  for (const Arc& arc : arcs_) sum += arc.weight;
  return sum;
}

std::vector<std::vector<NodeIndex>> SnapshotGraph::undirected_adjacency() const {
  std::vector<std::vector<NodeIndex>> adjacency(node_count());
  for (const Arc& arc : arcs_) {
    adjacency[arc.source].push_back(arc.target);
    adjacency[arc.target].push_back(arc.source);
  }
  for (auto& neighbors : adjacency) {
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
  }
  return adjacency;
}

void GraphBuilder::add_node(std::string_view name) {
  nodes_.emplace(name);
}

void GraphBuilder::add_arc(std::string_view source, std::string_view target, double weight) {
  if (!(weight >= 0.0)) throw ParameterError("arc weight must be non-negative");
  if (source == target || weight == 0.0) return;
  nodes_.emplace(source);
  nodes_.emplace(target);
  arcs_[{std::string(source), std::string(target)}] += weight;
}

SnapshotGraph GraphBuilder::build() const {
  SnapshotGraph graph;
  graph.names_.assign(nodes_.begin(), nodes_.end());
  const std::size_t n = graph.names_.size();

  auto index_of = [&](const std::string& name) {
    return *graph.find_node(name);
  };

  // std::map iterates (source, target) lexicographically, which matches the
  // index order because names are sorted.
  graph.arcs_.reserve(arcs_.size());
  for (const auto& [key, weight] : arcs_) {
    graph.arcs_.push_back({index_of(key.first), index_of(key.second), weight});
  }

  graph.out_offsets_.assign(n + 1, 0);
  graph.in_offsets_.assign(n + 1, 0);
  for (const Arc& arc : graph.arcs_) {
    ++graph.out_offsets_[arc.source + 1];
    ++graph.in_offsets_[arc.target + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    graph.out_offsets_[i + 1] += graph.out_offsets_[i];
    graph.in_offsets_[i + 1] += graph.in_offsets_[i];
  }
  graph.in_sources_.resize(graph.arcs_.size());
  std::vector<std::size_t> cursor(graph.in_offsets_.begin(), graph.in_offsets_.end() - 1);
  for (const Arc& arc : graph.arcs_) graph.in_sources_[cursor[arc.target]++] = arc.source;
  return graph;
}

}  // namespace evochain
