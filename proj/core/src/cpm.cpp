#include "evochain/cpm.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "evochain/error.hpp"
#include "json.hpp"

namespace evochain::cpm {

using nlohmann::json;

namespace {

using Adjacency = std::vector<std::vector<NodeIndex>>;

NodeSet intersect(const NodeSet& a, const std::vector<NodeIndex>& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool adjacent(const Adjacency& adjacency, NodeIndex u, NodeIndex v) {
  const auto& n = adjacency[u];
  return std::binary_search(n.begin(), n.end(), v);
}

void bron_kerbosch(const Adjacency& adjacency, NodeSet& clique, NodeSet candidates,
                   NodeSet excluded, std::vector<NodeSet>& out) {
  if (candidates.empty()) {
    if (excluded.empty()) {
      NodeSet sorted = clique;
      std::sort(sorted.begin(), sorted.end());
      out.push_back(std::move(sorted));
    }
    return;
  }
  // Pivot maximizing |candidates ∩ N(pivot)|.
  NodeIndex pivot = candidates.front();
  std::size_t best = intersect(candidates, adjacency[pivot]).size();
  for (const NodeSet* pool : {&candidates, &excluded}) {
    for (NodeIndex u : *pool) {
      std::size_t overlap = intersect(candidates, adjacency[u]).size();
      if (overlap > best) {
        best = overlap;
        pivot = u;
      }
    }
  }
  NodeSet branch;
  std::set_difference(candidates.begin(), candidates.end(), adjacency[pivot].begin(),
                      adjacency[pivot].end(), std::back_inserter(branch));
  for (NodeIndex v : branch) {
    clique.push_back(v);
    bron_kerbosch(adjacency, clique, intersect(candidates, adjacency[v]),
                  intersect(excluded, adjacency[v]), out);
    clique.pop_back();
    candidates.erase(std::lower_bound(candidates.begin(), candidates.end(), v));
    excluded.insert(std::lower_bound(excluded.begin(), excluded.end(), v), v);
  }
}

std::vector<NodeIndex> degeneracy_order(const Adjacency& adjacency) {
  const std::size_t n = adjacency.size();
  std::vector<std::size_t> degree(n);
  std::size_t max_degree = 0;
  for (std::size_t v = 0; v < n; ++v) {
    degree[v] = adjacency[v].size();
    max_degree = std::max(max_degree, degree[v]);
  }
  std::vector<std::vector<NodeIndex>> buckets(max_degree + 1);
  for (std::size_t v = 0; v < n; ++v) buckets[degree[v]].push_back(static_cast<NodeIndex>(v));
  std::vector<bool> removed(n, false);
  std::vector<NodeIndex> order;
  order.reserve(n);
  std::size_t cursor = 0;
  while (order.size() < n) {
    cursor = 0;
    while (buckets[cursor].empty()) ++cursor;
    NodeIndex v = buckets[cursor].back();
    buckets[cursor].pop_back();
    if (removed[v] || degree[v] != cursor) continue;
    removed[v] = true;
    order.push_back(v);
    for (NodeIndex u : adjacency[v]) {
      if (!removed[u]) {
        --degree[u];
        buckets[degree[u]].push_back(u);
      }
    }
  }
  return order;
}

std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double value = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    value = value * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (value > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(value + 0.5L);
}

void throw_cap(std::size_t cap) {
  throw ResourceError("k-clique enumeration exceeded the cap of " + std::to_string(cap));
}

void dedupe(std::vector<NodeSet>& cliques) {
  std::sort(cliques.begin(), cliques.end());
  cliques.erase(std::unique(cliques.begin(), cliques.end()), cliques.end());
}

std::vector<NodeSet> expand_maximal(const SnapshotGraph& graph, int k, std::size_t cap) {
  std::vector<NodeSet> out;
  std::size_t pending = 0;
  for (const NodeSet& clique : maximal_cliques(graph)) {
    if (clique.size() < static_cast<std::size_t>(k)) continue;
    if (binomial_capped(clique.size(), k, cap) > cap) throw_cap(cap);
    // Lexicographic k-combinations of the clique.
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      NodeSet subset(k);
      for (int i = 0; i < k; ++i) subset[i] = clique[pick[i]];
      out.push_back(std::move(subset));
      if (++pending > 4 * cap) {
        dedupe(out);
        if (out.size() > cap) throw_cap(cap);
        pending = out.size();
      }
      int i = k - 1;
      while (i >= 0 && pick[i] == clique.size() - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  dedupe(out);
  if (out.size() > cap) throw_cap(cap);
  return out;
}

void extend_direct(const Adjacency& adjacency, int k, NodeSet& clique, const NodeSet& candidates,
                   std::size_t cap, std::vector<NodeSet>& out) {
  if (static_cast<int>(clique.size()) == k) {
    out.push_back(clique);
    if (out.size() > cap) throw_cap(cap);
    return;
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    NodeIndex v = candidates[i];
    if (candidates.size() - i < static_cast<std::size_t>(k) - clique.size()) break;
    NodeSet next;
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (adjacent(adjacency, v, candidates[j])) next.push_back(candidates[j]);
    }
    clique.push_back(v);
    extend_direct(adjacency, k, clique, next, cap, out);
    clique.pop_back();
  }
}

std::vector<NodeSet> direct_search(const SnapshotGraph& graph, int k, std::size_t cap) {
  const Adjacency adjacency = graph.undirected_adjacency();
  std::vector<NodeSet> out;
  NodeSet clique;
  for (NodeIndex v = 0; v < adjacency.size(); ++v) {
    NodeSet higher;
    for (NodeIndex u : adjacency[v]) {
      if (u > v) higher.push_back(u);
    }
    clique.push_back(v);
    extend_direct(adjacency, k, clique, higher, cap, out);
    clique.pop_back();
  }
  return out;  // produced in lexicographic order without duplicates
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<NodeSet> maximal_cliques(const SnapshotGraph& graph) {
  const Adjacency adjacency = graph.undirected_adjacency();
  const auto order = degeneracy_order(adjacency);
  std::vector<std::size_t> position(adjacency.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  std::vector<NodeSet> out;
  NodeSet clique;
  for (NodeIndex v : order) {
    NodeSet later;
    NodeSet earlier;
    for (NodeIndex u : adjacency[v]) {
      (position[u] > position[v] ? later : earlier).push_back(u);
    }
    clique.assign(1, v);
    bron_kerbosch(adjacency, clique, std::move(later), std::move(earlier), out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeSet> enumerate_k_cliques(const SnapshotGraph& graph, int k,
                                         const CliqueOptions& options) {
  if (k < 3) throw ParameterError("clique size k must be at least 3");
  if (options.strategy == CliqueStrategy::direct) return direct_search(graph, k, options.max_cliques);
  return expand_maximal(graph, k, options.max_cliques);
}

std::vector<NodeSet> percolate(std::span<const NodeSet> cliques, int k) {
  if (k < 2) throw ParameterError("clique size k must be at least 2");
  for (const auto& clique : cliques) {
    if (clique.size() != static_cast<std::size_t>(k)) {
      throw ParameterError("percolate expects cliques of size exactly k");
    }
  }
  // Cliques sharing k-1 nodes share a (k-1)-face; index faces to find them.
  DisjointSets components(cliques.size());
  std::map<NodeSet, std::size_t> face_owner;
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    for (int skip = 0; skip < k; ++skip) {
      NodeSet face;
      face.reserve(k - 1);
      for (int i = 0; i < k; ++i) {
        if (i != skip) face.push_back(cliques[c][i]);
      }
      auto [it, inserted] = face_owner.emplace(std::move(face), c);
      if (!inserted) components.unite(it->second, c);
    }
  }
  std::map<std::size_t, NodeSet> unions;
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    auto& members = unions[components.find(c)];
    members.insert(members.end(), cliques[c].begin(), cliques[c].end());
  }
  std::vector<NodeSet> result;
  result.reserve(unions.size());
  for (auto& [root, members] : unions) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    result.push_back(std::move(members));
  }
  std::sort(result.begin(), result.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  return result;
}

std::vector<Community> detect_communities(const SnapshotGraph& graph, int k,
                                          std::size_t frame_index,
                                          const CliqueOptions& options) {
  const auto cliques = enumerate_k_cliques(graph, k, options);
  const auto groups = percolate(cliques, k);
  std::vector<Community> communities;
  communities.reserve(groups.size());
  for (std::size_t id = 0; id < groups.size(); ++id) {
    Community community{frame_index, id, {}};
    community.members.reserve(groups[id].size());
    for (NodeIndex node : groups[id]) community.members.push_back(graph.node_name(node));
    communities.push_back(std::move(community));
  }
  return communities;
}

void write_communities(std::ostream& out, std::span<const Community> communities) {
  for (const auto& community : communities) {
    json object = {{"frame", community.frame_index},
                   {"id", community.id},
                   {"members", community.members}};
    out << object.dump() << '\n';
  }
}

std::vector<Community> read_communities(std::istream& in) {
  std::vector<Community> communities;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      json object = json::parse(line);
      Community community;
      community.frame_index = object.at("frame").get<std::size_t>();
      community.id = object.at("id").get<std::size_t>();
      community.members = object.at("members").get<std::vector<std::string>>();
      if (!std::is_sorted(community.members.begin(), community.members.end())) {
        throw ParseError(line_no, "community members must be sorted");
      }
      communities.push_back(std::move(community));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed community record: ") + e.what());
    }
  }
  return communities;
}

std::vector<std::vector<Community>> by_frame(std::span<const Community> communities,
                                             std::size_t frame_count) {
  std::vector<std::vector<Community>> frames(frame_count);
  for (const auto& community : communities) {
    if (community.frame_index >= frame_count) {
      throw IntegrityError("community refers to frame " + std::to_string(community.frame_index) +
                           " beyond the " + std::to_string(frame_count) + " known frames");
    }
    frames[community.frame_index].push_back(community);
  }
  for (std::size_t f = 0; f < frame_count; ++f) {
    auto& list = frames[f];
    std::sort(list.begin(), list.end(),
              [](const Community& a, const Community& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].id != i) {
        throw IntegrityError("community ids in frame " + std::to_string(f) + " are not contiguous");
      }
    }
  }
  return frames;
}

}  // namespace evochain::cpm
