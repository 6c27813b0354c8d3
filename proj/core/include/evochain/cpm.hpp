#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "evochain/graph.hpp"
#include "evochain/types.hpp"

/// Clique percolation community detection on the undirected view of a
/// snapshot (an arc in either direction makes two nodes adjacent).
namespace evochain::cpm {

/// Sorted node indices.
using NodeSet = std::vector<NodeIndex>;

enum class CliqueStrategy {
  direct,             // ordered backtracking over k-subsets
  maximal_expansion,  // Bron-Kerbosch maximal cliques, expanded to k-subsets
};

struct CliqueOptions {
  std::size_t max_cliques = 2'000'000;
  CliqueStrategy strategy = CliqueStrategy::direct;
};

/// Every maximal clique exactly once (Bron-Kerbosch with Tomita pivoting
/// over a degeneracy ordering). Isolated nodes form singleton cliques.
std::vector<NodeSet> maximal_cliques(const SnapshotGraph& graph);

/// All size-k complete subgraphs, sorted, without duplicates.
/// Throws ParameterError for k < 3 and ResourceError beyond `max_cliques`.
std::vector<NodeSet> enumerate_k_cliques(const SnapshotGraph& graph, int k,
                                         const CliqueOptions& options = {});

/// Unions k-cliques connected through shared (k-1)-faces. The result is
/// ordered by size descending then lexicographically; position is the id.
std::vector<NodeSet> percolate(std::span<const NodeSet> cliques, int k);

std::vector<Community> detect_communities(const SnapshotGraph& graph, int k,
                                          std::size_t frame_index,
                                          const CliqueOptions& options = {});

/// JSON lines: {"frame":f,"id":i,"members":[...]}.
void write_communities(std::ostream& out, std::span<const Community> communities);
std::vector<Community> read_communities(std::istream& in);

/// Groups communities by frame; the outer vector has `frame_count` entries
/// and each inner list is ordered by id.
std::vector<std::vector<Community>> by_frame(std::span<const Community> communities,
                                             std::size_t frame_count);

}  // namespace evochain::cpm
