#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "evochain/error.hpp"
#include "evochain/metrics.hpp"
#include "oracles.hpp"

using namespace evochain;
using namespace evochain::metrics;

namespace {

SnapshotGraph arcs(std::initializer_list<std::tuple<const char*, const char*, double>> list) {
  GraphBuilder b;
  for (const auto& [u, v, w] : list) b.add_arc(u, v, w);
  return b.build();
}

std::vector<NodeIndex> all_nodes(const SnapshotGraph& g) {
  std::vector<NodeIndex> nodes(g.node_count());
  std::iota(nodes.begin(), nodes.end(), 0);
  return nodes;
}

SnapshotGraph complete_digraph(int n) {
  GraphBuilder b;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) b.add_arc("n" + std::to_string(i), "n" + std::to_string(j));
    }
  }
  return b.build();
}

}  // namespace

TEST(Density, Examples) {
  const auto full = complete_digraph(3);
  EXPECT_DOUBLE_EQ(density(full, all_nodes(full)), 1.0);
  auto g = arcs({{"a", "b", 1}, {"b", "a", 1}});
  GraphBuilder b;
  b.add_arc("a", "b");
  b.add_arc("b", "a");
  b.add_node("c");
  g = b.build();
  EXPECT_NEAR(density(g, all_nodes(g)), 2.0 / 6.0, 1e-12);
  const std::vector<NodeIndex> single{0};
  EXPECT_EQ(density(g, single), 0.0);
}

TEST(Cohesion, Examples) {
  const auto g = arcs({{"a", "b", 2}, {"b", "a", 2}, {"b", "c", 1}});
  const auto group = resolve_members(g, std::vector<std::string>{"a", "b"});
  EXPECT_NEAR(cohesion(g, group).value, 8.0 / 3.0, 1e-12);

  const auto no_internal = arcs({{"a", "c", 1}, {"b", "c", 1}});
  EXPECT_EQ(cohesion(no_internal, resolve_members(no_internal, std::vector<std::string>{"a", "b"})).value, 0.0);

  GraphBuilder b;
  b.add_arc("a", "b");
  b.add_arc("c", "a");
  const auto isolated = b.build();
  EXPECT_EQ(cohesion(isolated, resolve_members(isolated, std::vector<std::string>{"a", "b"})).value, 1e6);
  EXPECT_EQ(cohesion(isolated, resolve_members(isolated, std::vector<std::string>{"a", "b"}), 42.0).value, 42.0);
}

TEST(Cohesion, WholeNetworkIsFlagged) {
  const auto g = complete_digraph(3);
  const auto c = cohesion(g, all_nodes(g));
  EXPECT_TRUE(c.singular);
}

TEST(Leadership, Examples) {
  const auto star = arcs({{"c", "a", 1}, {"c", "b", 1}, {"d", "c", 1}, {"c", "e", 1}});
  EXPECT_NEAR(leadership(star, all_nodes(star)), 1.0, 1e-12);
  const auto cycle = arcs({{"a", "b", 1}, {"b", "c", 1}, {"c", "d", 1}, {"d", "a", 1}});
  EXPECT_EQ(leadership(cycle, all_nodes(cycle)), 0.0);
  const auto pair = arcs({{"a", "b", 1}});
  EXPECT_EQ(leadership(pair, all_nodes(pair)), 0.0);
}

TEST(Reciprocity, Examples) {
  const auto mutual = arcs({{"a", "b", 1}, {"b", "a", 1}});
  EXPECT_EQ(reciprocity(mutual, all_nodes(mutual)), 1.0);
  const auto one_way = arcs({{"a", "b", 1}});
  EXPECT_EQ(reciprocity(one_way, all_nodes(one_way)), 0.0);
  const auto mixed = arcs({{"a", "b", 1}, {"b", "a", 1}, {"b", "c", 1}});
  EXPECT_NEAR(reciprocity(mixed, all_nodes(mixed)), 2.0 / 3.0, 1e-12);
}

TEST(Degrees, Examples) {
  GraphBuilder b;
  b.add_arc("a", "b");
  b.add_arc("c", "b");
  b.add_node("z");
  const auto g = b.build();
  const auto d = degrees(g);
  const auto bi = *g.find_node("b");
  const auto zi = *g.find_node("z");
  EXPECT_EQ(d.in[bi], 2.0);
  EXPECT_EQ(d.out[bi], 0.0);
  EXPECT_EQ(d.total[bi], 2.0);
  EXPECT_EQ(d.total[zi], 0.0);
  const auto m = arcs({{"a", "b", 1}, {"b", "a", 1}});
  EXPECT_EQ(degrees(m).total, (std::vector<double>{2.0, 2.0}));
}

TEST(Betweenness, Examples) {
  const auto path = arcs({{"a", "b", 1}, {"b", "c", 1}});
  EXPECT_EQ(betweenness(path), (std::vector<double>{0.0, 1.0, 0.0}));
  const auto cycle = arcs({{"a", "b", 1}, {"b", "c", 1}, {"c", "d", 1}, {"d", "a", 1}});
  for (double v : betweenness(cycle)) EXPECT_NEAR(v, 3.0, 1e-12);
  for (double v : betweenness(complete_digraph(4))) EXPECT_EQ(v, 0.0);
}

// On a directed 4-cycle every node is an inner node of three ordered geodesics
// (for b: a->c, a->d and d->c), so each scores 3.
TEST(Betweenness, CycleAgreesWithOracle) {
  const auto cycle = arcs({{"a", "b", 1}, {"b", "c", 1}, {"c", "d", 1}, {"d", "a", 1}});
  EXPECT_EQ(betweenness(cycle), oracles::betweenness(cycle));
}

TEST(Closeness, Examples) {
  const auto path = arcs({{"a", "b", 1}, {"b", "c", 1}});
  const auto c = closeness(path);
  EXPECT_DOUBLE_EQ(c[0], 1.5);
  EXPECT_EQ(c[2], 0.0);
  for (double v : closeness(complete_digraph(5))) EXPECT_DOUBLE_EQ(v, 4.0);
}

TEST(Centralities, MatchPathEnumerationOracles) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto g = oracles::random_digraph(1 + seed % 8, 0.3, seed);
    const auto b = betweenness(g);
    const auto expected_b = oracles::betweenness(g);
    const auto c = closeness(g);
    const auto expected_c = oracles::closeness(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      EXPECT_NEAR(b[i], expected_b[i], 1e-12);
      EXPECT_NEAR(c[i], expected_c[i], 1e-12);
    }
  }
}

TEST(Eigenvector, Examples) {
  const auto edge = arcs({{"a", "b", 1}});
  EXPECT_EQ(eigenvector(edge), (std::vector<double>{1.0, 1.0}));
  const auto star = arcs({{"c", "a", 1}, {"c", "b", 1}, {"d", "c", 1}});
  const auto e = eigenvector(star);
  const auto center = *star.find_node("c");
  EXPECT_NEAR(e[center], 1.0, 1e-7);
  for (NodeIndex i = 0; i < 4; ++i) {
    if (i != center) EXPECT_NEAR(e[i], 1.0 / std::sqrt(3.0), 1e-6);
  }
  GraphBuilder b;
  b.add_node("lonely");
  b.add_arc("a", "b");
  const auto g = b.build();
  EXPECT_EQ(eigenvector(g)[*g.find_node("lonely")], 0.0);
}

TEST(Eigenvector, SatisfiesEigenEquationPerComponent) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = oracles::random_digraph(9, 0.25, seed);
    const auto e = eigenvector(g);
    const auto adj = g.undirected_adjacency();
    // Components via flood fill.
    std::vector<int> comp(g.node_count(), -1);
    int next = 0;
    for (NodeIndex s = 0; s < g.node_count(); ++s) {
      if (comp[s] >= 0) continue;
      std::vector<NodeIndex> stack{s};
      comp[s] = next;
      while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto w : adj[v]) {
          if (comp[w] < 0) {
            comp[w] = next;
            stack.push_back(w);
          }
        }
      }
      ++next;
    }
    for (int c = 0; c < next; ++c) {
      double lambda = 0.0;
      for (NodeIndex v = 0; v < g.node_count(); ++v) {
        if (comp[v] != c || e[v] != 1.0) continue;
        for (auto w : adj[v]) lambda += e[w];
        break;
      }
      for (NodeIndex v = 0; v < g.node_count(); ++v) {
        if (comp[v] != c || adj[v].empty()) continue;
        double av = 0.0;
        for (auto w : adj[v]) av += e[w];
        EXPECT_NEAR(av, lambda * e[v], 1e-6) << "seed " << seed;
      }
    }
  }
}

TEST(SocialPosition, Examples) {
  const auto mutual = arcs({{"a", "b", 2}, {"b", "a", 2}});
  for (double v : social_position(mutual)) EXPECT_NEAR(v, 1.0, 1e-8);
  GraphBuilder b;
  b.add_node("a");
  b.add_node("b");
  for (double v : social_position(b.build())) EXPECT_NEAR(v, 0.1, 1e-12);
  const auto one = arcs({{"a", "b", 1}});
  const auto sp = social_position(one, 0.9);
  EXPECT_NEAR(sp[0], 0.1, 1e-9);
  EXPECT_NEAR(sp[1], 0.19, 1e-9);
}

TEST(SocialPosition, ConservesMassWhenEveryNodeSends) {
  const auto g = arcs({{"a", "b", 1}, {"b", "c", 3}, {"c", "a", 1}, {"c", "b", 2}, {"a", "c", 0.5}});
  const auto sp = social_position(g);
  EXPECT_NEAR(std::accumulate(sp.begin(), sp.end(), 0.0), 3.0, 1e-6);
}

TEST(SocialPosition, EpsilonOutOfRangeIsAnError) {
  EXPECT_THROW(social_position(arcs({{"a", "b", 1}}), 1.0), ParameterError);
}

TEST(GroupProfile, WidthsAndAggregates) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto g = oracles::random_digraph(8, 0.4, seed);
    const auto scores = compute_node_scores(g);
    std::vector<NodeIndex> group{0, 2, 3, 5};
    const auto sgci = group_profile(g, group, scores, ProfileMode::sgci);
    ASSERT_EQ(sgci.values.size(), 29u);
    const auto ged = group_profile(g, group, scores, ProfileMode::ged, Inclusion{70, 40});
    ASSERT_EQ(ged.values.size(), 31u);
    EXPECT_EQ(ged.values[29], 70.0);
    EXPECT_EQ(ged.values[30], 40.0);
    EXPECT_EQ(feature_names(ProfileMode::sgci).size(), 29u);
    for (std::size_t block = 0; block < 6; ++block) {
      const double avg = sgci.values[5 + 4 * block];
      const double sum = sgci.values[6 + 4 * block];
      const double lo = sgci.values[7 + 4 * block];
      const double hi = sgci.values[8 + 4 * block];
      EXPECT_NEAR(avg * 4.0, sum, 1e-9);
      EXPECT_LE(lo, avg + 1e-12);
      EXPECT_GE(hi, avg - 1e-12);
    }
    for (std::size_t i : {1u, 3u, 4u}) {
      EXPECT_GE(sgci.values[i], 0.0);
      EXPECT_LE(sgci.values[i], 1.0);
    }
  }
}

TEST(GroupProfile, IdenticalScoresCollapseAggregates) {
  const auto g = complete_digraph(4);
  const auto p = group_profile(g, all_nodes(g), compute_node_scores(g), ProfileMode::sgci);
  for (std::size_t block = 0; block < 6; ++block) {
    EXPECT_NEAR(p.values[5 + 4 * block], p.values[7 + 4 * block], 1e-12);
    EXPECT_NEAR(p.values[5 + 4 * block], p.values[8 + 4 * block], 1e-12);
  }
}

TEST(GroupProfile, GedModeNeedsInclusion) {
  const auto g = complete_digraph(3);
  EXPECT_THROW(group_profile(g, all_nodes(g), compute_node_scores(g), ProfileMode::ged), ParameterError);
}

TEST(GroupProfile, UnknownMemberIsIntegrityError) {
  const auto g = complete_digraph(3);
  EXPECT_THROW(resolve_members(g, std::vector<std::string>{"n0", "ghost"}), IntegrityError);
}
