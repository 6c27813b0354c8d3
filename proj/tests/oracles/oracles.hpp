#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "evochain/chains.hpp"
#include "evochain/dataset.hpp"
#include "evochain/graph.hpp"

/// Slow reference implementations used to cross-check the library.
namespace evochain::oracles {

/// Directed graph on n nodes "v00".."v(n-1)" with each ordered pair present
/// with probability p. Every node is registered even without arcs.
SnapshotGraph random_digraph(std::size_t n, double p, std::uint64_t seed);

/// Betweenness from every simple path: for each ordered pair (s, t) the
/// geodesics are the shortest simple paths, and each inner node earns its
/// share of them.
std::vector<double> betweenness(const SnapshotGraph& graph);

/// Harmonic closeness with distances taken as the shortest simple path.
std::vector<double> closeness(const SnapshotGraph& graph);

/// Clique percolation by testing every k-subset for completeness and joining
/// cliques that share k - 1 nodes. Member lists of the communities, ordered by
/// size descending then lexicographically.
std::vector<std::vector<std::string>> percolation(const SnapshotGraph& graph, int k);

struct RootSplit {
  /// -1 when no admissible split exists.
  int feature = -1;
  /// Gain ratio of every feature's best admissible threshold split (-1 when
  /// the feature admits none).
  std::vector<double> ratio;
};

/// Gain-ratio maximizer over binary threshold splits of all rows, honoring
/// min_leaf on both sides. Among near-equal ratios the lowest feature wins.
RootSplit root_split(const Dataset& data, std::size_t min_leaf);

/// Backward paths of exactly `length` states over the history links, counted
/// once per target of the focal group, found by trying every state sequence.
std::size_t chain_count(const chains::TransitionGraph& graph, std::size_t length);

}  // namespace evochain::oracles
