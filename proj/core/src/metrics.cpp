#include "evochain/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

#include "evochain/error.hpp"
#include "format.hpp"

namespace evochain::metrics {

Degrees degrees(const SnapshotGraph& graph) {
  const std::size_t n = graph.node_count();
  Degrees result{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (NodeIndex v = 0; v < n; ++v) {
    result.in[v] = static_cast<double>(graph.in_sources(v).size());
    result.out[v] = static_cast<double>(graph.out_arcs(v).size());
    result.total[v] = result.in[v] + result.out[v];
  }
  return result;
}

std::vector<double> betweenness(const SnapshotGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> centrality(n, 0.0);
  std::vector<std::vector<NodeIndex>> predecessors(n);
  std::vector<double> paths(n);
  std::vector<long> distance(n);
  std::vector<double> dependency(n);
  std::vector<NodeIndex> stack;
  std::vector<NodeIndex> queue;
  stack.reserve(n);
  queue.reserve(n);

  for (NodeIndex source = 0; source < n; ++source) {
    for (auto& list : predecessors) list.clear();
    std::fill(paths.begin(), paths.end(), 0.0);
    std::fill(distance.begin(), distance.end(), -1);
    std::fill(dependency.begin(), dependency.end(), 0.0);
    stack.clear();
    queue.clear();

    paths[source] = 1.0;
    distance[source] = 0;
    queue.push_back(source);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeIndex v = queue[head];
      stack.push_back(v);
      for (const Arc& arc : graph.out_arcs(v)) {
        NodeIndex w = arc.target;
        if (distance[w] < 0) {
          distance[w] = distance[v] + 1;
          queue.push_back(w);
        }
        if (distance[w] == distance[v] + 1) {
          paths[w] += paths[v];
          predecessors[w].push_back(v);
        }
      }
    }
    while (!stack.empty()) {
      NodeIndex w = stack.back();
      stack.pop_back();
      for (NodeIndex v : predecessors[w]) {
        dependency[v] += paths[v] / paths[w] * (1.0 + dependency[w]);
      }
      if (w != source) centrality[w] += dependency[w];
    }
  }
  return centrality;
}

std::vector<double> closeness(const SnapshotGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> result(n, 0.0);
  std::vector<long> distance(n);
  std::vector<NodeIndex> queue;
  queue.reserve(n);
  for (NodeIndex source = 0; source < n; ++source) {
    std::fill(distance.begin(), distance.end(), -1);
    queue.assign(1, source);
    distance[source] = 0;
    double sum = 0.0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      NodeIndex v = queue[head];
      for (const Arc& arc : graph.out_arcs(v)) {
        if (distance[arc.target] < 0) {
          distance[arc.target] = distance[v] + 1;
          sum += 1.0 / static_cast<double>(distance[arc.target]);
          queue.push_back(arc.target);
        }
      }
    }
    result[source] = sum;
  }
  return result;
}

std::vector<double> eigenvector(const SnapshotGraph& graph, const IterationOptions& options) {
  const std::size_t n = graph.node_count();
  const auto adjacency = graph.undirected_adjacency();
  std::vector<double> result(n, 0.0);
  std::vector<bool> seen(n, false);
  std::vector<NodeIndex> component;
  std::vector<double> next(n, 0.0);

  for (NodeIndex root = 0; root < n; ++root) {
    if (seen[root]) continue;
    component.assign(1, root);
    seen[root] = true;
    for (std::size_t head = 0; head < component.size(); ++head) {
      for (NodeIndex u : adjacency[component[head]]) {
        if (!seen[u]) {
          seen[u] = true;
          component.push_back(u);
        }
      }
    }
    if (component.size() == 1) continue;  // isolated node scores 0

    for (NodeIndex v : component) result[v] = 1.0;
    double residual = std::numeric_limits<double>::infinity();
    int iteration = 0;
    for (; iteration < options.max_iterations && residual >= options.tolerance; ++iteration) {
      double peak = 0.0;
      for (NodeIndex v : component) {
        double sum = result[v];
        for (NodeIndex u : adjacency[v]) sum += result[u];
        next[v] = sum;
        peak = std::max(peak, sum);
      }
      residual = 0.0;
      for (NodeIndex v : component) {
        double scaled = next[v] / peak;
        residual = std::max(residual, std::abs(scaled - result[v]));
        next[v] = scaled;
      }
      for (NodeIndex v : component) result[v] = next[v];
    }
    if (residual >= options.tolerance) {
      throw ConvergenceError("eigenvector centrality did not converge in " +
                                 std::to_string(options.max_iterations) + " iterations",
                             residual);
    }
  }
  return result;
}

std::vector<double> social_position(const SnapshotGraph& graph, double epsilon,
                                    const IterationOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError("social position epsilon must lie in (0, 1)");
  }
  const std::size_t n = graph.node_count();
  std::vector<double> out_weight(n);
  for (NodeIndex v = 0; v < n; ++v) out_weight[v] = graph.out_weight(v);

  std::vector<double> current(n, 1.0);
  std::vector<double> next(n);
  double residual = std::numeric_limits<double>::infinity();
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    std::fill(next.begin(), next.end(), 1.0 - epsilon);
    for (const Arc& arc : graph.arcs()) {
      next[arc.target] += epsilon * current[arc.source] * arc.weight / out_weight[arc.source];
    }
    residual = 0.0;
    for (std::size_t v = 0; v < n; ++v) residual = std::max(residual, std::abs(next[v] - current[v]));
    current.swap(next);
    if (residual < options.tolerance) return current;
  }
  if (n == 0) return current;
  throw ConvergenceError("social position did not converge in " +
                             std::to_string(options.max_iterations) + " iterations",
                         residual);
}

NodeScores compute_node_scores(const SnapshotGraph& graph, const ScoreOptions& options) {
  NodeScores scores;
  auto d = degrees(graph);
  scores.in_degree = std::move(d.in);
  scores.out_degree = std::move(d.out);
  scores.total_degree = std::move(d.total);
  scores.betweenness = betweenness(graph);
  scores.closeness = closeness(graph);
  scores.eigenvector = eigenvector(graph, options.iteration);
  scores.social_position =
      social_position(graph, options.social_position_epsilon, options.iteration);
  return scores;
}

std::vector<NodeIndex> resolve_members(const SnapshotGraph& graph,
                                       std::span<const std::string> members) {
  std::vector<NodeIndex> nodes;
  nodes.reserve(members.size());
  for (const auto& name : members) {
    auto node = graph.find_node(name);
    if (!node) throw IntegrityError("group member '" + name + "' is not a node of the snapshot");
    nodes.push_back(*node);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

namespace {

bool contains(std::span<const NodeIndex> members, NodeIndex node) {
  return std::binary_search(members.begin(), members.end(), node);
}

}  // namespace

double density(const SnapshotGraph& graph, std::span<const NodeIndex> members) {
  const std::size_t n = members.size();
  if (n <= 1) return 0.0;
  std::size_t arcs = 0;
  for (NodeIndex i : members) {
    for (const Arc& arc : graph.out_arcs(i)) {
      if (contains(members, arc.target)) ++arcs;
    }
  }
  return static_cast<double>(arcs) / static_cast<double>(n * (n - 1));
}

Cohesion cohesion(const SnapshotGraph& graph, std::span<const NodeIndex> members, double cap) {
  if (members.empty()) throw ParameterError("cohesion of an empty group");
  const double n = static_cast<double>(members.size());
  const double total = static_cast<double>(graph.node_count());
  double internal = 0.0;
  double external = 0.0;
  for (NodeIndex i : members) {
    for (const Arc& arc : graph.out_arcs(i)) {
      (contains(members, arc.target) ? internal : external) += arc.weight;
    }
  }
  const bool singular = members.size() >= graph.node_count();
  if (internal == 0.0) return {0.0, singular};
  if (singular || external == 0.0) return {cap, singular};
  return {(internal / external) * (n * (n - 1.0)) / (total * (total - n)), false};
}

double leadership(const SnapshotGraph& graph, std::span<const NodeIndex> members) {
  const std::size_t n = members.size();
  if (n < 3) return 0.0;
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (graph.has_arc(members[a], members[b]) || graph.has_arc(members[b], members[a])) {
        ++degree[a];
        ++degree[b];
      }
    }
  }
  const std::size_t max_degree = *std::max_element(degree.begin(), degree.end());
  double sum = 0.0;
  for (std::size_t d : degree) sum += static_cast<double>(max_degree - d);
  return sum / static_cast<double>((n - 2) * (n - 1));
}

double reciprocity(const SnapshotGraph& graph, std::span<const NodeIndex> members) {
  std::size_t arcs = 0;
  std::size_t reciprocated = 0;
  for (NodeIndex i : members) {
    for (const Arc& arc : graph.out_arcs(i)) {
      if (!contains(members, arc.target)) continue;
      ++arcs;
      if (graph.has_arc(arc.target, i)) ++reciprocated;
    }
  }
  if (arcs == 0) return 0.0;
  return static_cast<double>(reciprocated) / static_cast<double>(arcs);
}

namespace {

const std::array<const char*, 6> kCentralities = {"indegree",    "outdegree", "total_degree",
                                                  "betweenness", "closeness", "eigenvector"};

std::vector<std::string> make_names(ProfileMode mode) {
  std::vector<std::string> names = {"size", "density", "cohesion", "leadership", "reciprocity"};
  for (const char* measure : kCentralities) {
    for (const char* aggregate : {"avg", "sum", "min", "max"}) {
      names.push_back(std::string(aggregate) + "_" + measure);
    }
  }
  if (mode == ProfileMode::ged) {
    names.push_back("alpha");
    names.push_back("beta");
  }
  return names;
}

}  // namespace

std::span<const std::string> feature_names(ProfileMode mode) {
  static const std::vector<std::string> sgci = make_names(ProfileMode::sgci);
  static const std::vector<std::string> ged = make_names(ProfileMode::ged);
  return mode == ProfileMode::sgci ? std::span<const std::string>(sgci)
                                   : std::span<const std::string>(ged);
}

GroupProfile GroupProfile::with_inclusion(const Inclusion& inclusion) const {
  GroupProfile profile = *this;
  profile.values.resize(kSgciFeatureCount);
  profile.values.push_back(inclusion.alpha);
  profile.values.push_back(inclusion.beta);
  profile.mode = ProfileMode::ged;
  return profile;
}

GroupProfile group_profile(const SnapshotGraph& graph, std::span<const NodeIndex> members,
                           const NodeScores& scores, ProfileMode mode,
                           std::optional<Inclusion> inclusion, const ProfileOptions& options) {
  if (members.empty()) throw ParameterError("profile of an empty group");
  if (scores.size() != graph.node_count()) {
    throw IntegrityError("node scores do not belong to this snapshot");
  }
  for (NodeIndex member : members) {
    if (member >= scores.size()) throw IntegrityError("group member has no node scores");
  }
  if (mode == ProfileMode::ged && !inclusion) {
    throw ParameterError("GED profiles need the group's inclusion measures");
  }

  GroupProfile profile;
  profile.mode = mode;
  auto& values = profile.values;
  values.reserve(mode == ProfileMode::ged ? kGedFeatureCount : kSgciFeatureCount);
  const Cohesion co = cohesion(graph, members, options.cohesion_cap);
  profile.cohesion_singular = co.singular;
  values.push_back(static_cast<double>(members.size()));
  values.push_back(density(graph, members));
  values.push_back(co.value);
  values.push_back(leadership(graph, members));
  values.push_back(reciprocity(graph, members));

  const std::array<const std::vector<double>*, 6> measures = {
      &scores.in_degree,   &scores.out_degree, &scores.total_degree,
      &scores.betweenness, &scores.closeness,  &scores.eigenvector};
  for (const auto* measure : measures) {
    double sum = 0.0;
    double low = std::numeric_limits<double>::infinity();
    double high = -std::numeric_limits<double>::infinity();
    for (NodeIndex member : members) {
      double v = (*measure)[member];
      sum += v;
      low = std::min(low, v);
      high = std::max(high, v);
    }
    values.push_back(sum / static_cast<double>(members.size()));
    values.push_back(sum);
    values.push_back(low);
    values.push_back(high);
  }
  if (mode == ProfileMode::ged) {
    values.push_back(inclusion->alpha);
    values.push_back(inclusion->beta);
  }
  return profile;
}

void write_node_scores_header(std::ostream& out) {
  out << "frame,node,indegree,outdegree,total_degree,betweenness,closeness,eigenvector,"
         "social_position\n";
}

void write_node_scores(std::ostream& out, std::size_t frame, const SnapshotGraph& graph,
                       const NodeScores& scores) {
  using detail::format_number;
  for (NodeIndex v = 0; v < graph.node_count(); ++v) {
    out << frame << ',' << graph.node_name(v) << ',' << format_number(scores.in_degree[v]) << ','
        << format_number(scores.out_degree[v]) << ',' << format_number(scores.total_degree[v])
        << ',' << format_number(scores.betweenness[v]) << ','
        << format_number(scores.closeness[v]) << ',' << format_number(scores.eigenvector[v])
        << ',' << format_number(scores.social_position[v]) << '\n';
  }
}

void write_profiles_header(std::ostream& out, ProfileMode mode) {
  out << "frame,group";
  for (const auto& name : feature_names(mode)) out << ',' << name;
  out << '\n';
}

void write_profile(std::ostream& out, const GroupRef& group, const GroupProfile& profile) {
  out << group.frame << ',' << group.id;
  for (double v : profile.values) out << ',' << detail::format_number(v);
  out << '\n';
}

}  // namespace evochain::metrics
