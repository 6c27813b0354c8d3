#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evochain/graph.hpp"
#include "evochain/types.hpp"

/// Node centralities and group measures that make up a group profile.
///
/// Centralities are computed on the whole frame snapshot and then aggregated
/// over group members. Density, cohesion, leadership and reciprocity only look
/// at the group (and, for cohesion, the arcs leaving it).
namespace evochain::metrics {

struct IterationOptions {
  double tolerance = 1e-8;
  int max_iterations = 1000;
};

struct Degrees {
  std::vector<double> in;
  std::vector<double> out;
  std::vector<double> total;
};

/// Unweighted arc counts on the whole snapshot.
Degrees degrees(const SnapshotGraph& graph);

/// Exact directed, unweighted shortest-path betweenness over ordered pairs
/// (Brandes accumulation, no halving).
std::vector<double> betweenness(const SnapshotGraph& graph);

/// Harmonic closeness: sum over reachable j of 1/d(i, j) along out-arcs.
std::vector<double> closeness(const SnapshotGraph& graph);

/// Power iteration on the symmetrized unweighted adjacency, run per
/// connected component and scaled so each component's maximum is 1.
/// Isolated nodes score 0. Iterates with A + I, which shares eigenvectors
/// with A but cannot oscillate on bipartite components.
/// Throws ConvergenceError when the iteration cap is reached.
std::vector<double> eigenvector(const SnapshotGraph& graph, const IterationOptions& options = {});

/// Fixed point of SP(x) = (1 - e) + e * sum_y SP(y) w(y, x) / out_weight(y).
/// Nodes without out-weight redistribute nothing.
std::vector<double> social_position(const SnapshotGraph& graph, double epsilon = 0.9,
                                    const IterationOptions& options = {});

struct NodeScores {
  std::vector<double> in_degree;
  std::vector<double> out_degree;
  std::vector<double> total_degree;
  std::vector<double> betweenness;
  std::vector<double> closeness;
  std::vector<double> eigenvector;
  std::vector<double> social_position;

  std::size_t size() const noexcept { return in_degree.size(); }
};

struct ScoreOptions {
  double social_position_epsilon = 0.9;
  IterationOptions iteration;
};

NodeScores compute_node_scores(const SnapshotGraph& graph, const ScoreOptions& options = {});

/// Maps member names to node indices (sorted). A member that is not a node of
/// the snapshot is an IntegrityError.
std::vector<NodeIndex> resolve_members(const SnapshotGraph& graph,
                                       std::span<const std::string> members);

/// Ordered member pairs connected by an arc over n(n - 1); 0 for n <= 1.
double density(const SnapshotGraph& graph, std::span<const NodeIndex> members);

struct Cohesion {
  double value = 0.0;
  /// Set when the group covers the whole snapshot, where N(N - n) is zero.
  bool singular = false;
};

/// Internal over outgoing external weight, scaled by n(n-1) / (N(N-n)).
/// Zero internal weight gives 0; zero external weight gives `cap`.
Cohesion cohesion(const SnapshotGraph& graph, std::span<const NodeIndex> members,
                  double cap = 1e6);

/// Degree centralization of the group-induced undirected subgraph.
/// 0 for groups of fewer than three members.
double leadership(const SnapshotGraph& graph, std::span<const NodeIndex> members);

/// Reciprocated arc instances over arcs of the induced directed subgraph.
/// 0 when the subgraph has no arcs.
double reciprocity(const SnapshotGraph& graph, std::span<const NodeIndex> members);

enum class ProfileMode { sgci, ged };

inline constexpr std::size_t kSgciFeatureCount = 29;
inline constexpr std::size_t kGedFeatureCount = 31;

/// Column names in profile order: size, density, cohesion, leadership,
/// reciprocity, then {avg, sum, min, max} for indegree, outdegree,
/// total_degree, betweenness, closeness, eigenvector; GED adds alpha, beta.
std::span<const std::string> feature_names(ProfileMode mode);

struct GroupProfile {
  ProfileMode mode = ProfileMode::sgci;
  std::vector<double> values;
  bool cohesion_singular = false;

  /// Same profile in GED mode with the given inclusion appended.
  GroupProfile with_inclusion(const Inclusion& inclusion) const;
};

struct ProfileOptions {
  double cohesion_cap = 1e6;
};

/// `inclusion` is required in GED mode and ignored in SGCI mode.
GroupProfile group_profile(const SnapshotGraph& graph, std::span<const NodeIndex> members,
                           const NodeScores& scores, ProfileMode mode,
                           std::optional<Inclusion> inclusion = std::nullopt,
                           const ProfileOptions& options = {});

/// CSV with header frame,node,indegree,outdegree,total_degree,betweenness,
/// closeness,eigenvector,social_position.
void write_node_scores_header(std::ostream& out);
void write_node_scores(std::ostream& out, std::size_t frame, const SnapshotGraph& graph,
                       const NodeScores& scores);

/// CSV with header frame,group,<profile columns>.
void write_profiles_header(std::ostream& out, ProfileMode mode);
void write_profile(std::ostream& out, const GroupRef& group, const GroupProfile& profile);

}  // namespace evochain::metrics
