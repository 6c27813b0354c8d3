#include <gtest/gtest.h>

#include <sstream>

#include "evochain/cpm.hpp"
#include "evochain/error.hpp"
#include "oracles.hpp"

using namespace evochain;
using namespace evochain::cpm;

namespace {

SnapshotGraph undirected(std::initializer_list<std::pair<const char*, const char*>> edges) {
  GraphBuilder b;
  for (const auto& [u, v] : edges) b.add_arc(u, v);
  return b.build();
}

SnapshotGraph complete(std::initializer_list<const char*> nodes) {
  GraphBuilder b;
  for (const char* u : nodes) {
    for (const char* v : nodes) {
      if (std::string(u) < v) b.add_arc(u, v);
    }
  }
  return b.build();
}

std::vector<std::vector<std::string>> members(const std::vector<Community>& communities) {
  std::vector<std::vector<std::string>> out;
  for (const auto& c : communities) out.push_back(c.members);
  return out;
}

}  // namespace

TEST(KCliques, TriangleIsItsOwnClique) {
  const auto g = complete({"a", "b", "c"});
  EXPECT_EQ(enumerate_k_cliques(g, 3).size(), 1u);
  EXPECT_TRUE(enumerate_k_cliques(g, 4).empty());
}

TEST(KCliques, K4HasFourTriangles) {
  const auto cliques = enumerate_k_cliques(complete({"a", "b", "c", "d"}), 3);
  EXPECT_EQ(cliques.size(), 4u);
}

TEST(KCliques, SmallKIsAParameterError) {
  EXPECT_THROW(enumerate_k_cliques(complete({"a", "b", "c"}), 2), ParameterError);
}

TEST(KCliques, CapRaisesResourceError) {
  CliqueOptions options;
  options.max_cliques = 3;
  EXPECT_THROW(enumerate_k_cliques(complete({"a", "b", "c", "d"}), 3, options), ResourceError);
}

TEST(KCliques, StrategiesAgree) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = oracles::random_digraph(11, 0.35, seed);
    for (int k : {3, 4}) {
      CliqueOptions direct{2'000'000, CliqueStrategy::direct};
      CliqueOptions expansion{2'000'000, CliqueStrategy::maximal_expansion};
      EXPECT_EQ(enumerate_k_cliques(g, k, direct), enumerate_k_cliques(g, k, expansion));
    }
  }
}

TEST(Percolate, SharedEdgeJoinsTriangles) {
  const auto g = undirected({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"b", "d"}, {"c", "d"}});
  const auto found = detect_communities(g, 3, 0);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].members, (std::vector<std::string>{"a", "b", "c", "d"}));
}

TEST(Percolate, SharedNodeKeepsTrianglesApart) {
  const auto g = undirected({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"c", "d"}, {"d", "e"}, {"c", "e"}});
  const auto found = detect_communities(g, 3, 0);
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(found[0].members.size(), 3u);
  EXPECT_EQ(found[1].members.size(), 3u);
}

TEST(Percolate, NoCliquesNoCommunities) {
  EXPECT_TRUE(percolate({}, 3).empty());
}

TEST(DetectCommunities, K5IsOneCommunity) {
  const auto found = detect_communities(complete({"a", "b", "c", "d", "e"}), 3, 0);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].members.size(), 5u);
}

TEST(DetectCommunities, EdgelessGraphHasNone) {
  GraphBuilder b;
  b.add_node("a");
  b.add_node("b");
  EXPECT_TRUE(detect_communities(b.build(), 3, 0).empty());
}

TEST(DetectCommunities, IdsFollowSizeThenMembers) {
  const auto g = undirected({{"x", "y"}, {"y", "z"}, {"x", "z"},
                             {"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}});
  const auto found = detect_communities(g, 3, 4);
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(found[0].id, 0u);
  EXPECT_EQ(found[0].members.size(), 4u);
  EXPECT_EQ(found[1].id, 1u);
  EXPECT_EQ(found[1].members, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(found[1].frame_index, 4u);
}

TEST(DetectCommunities, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto g = oracles::random_digraph(10, 0.3, seed);
    for (int k : {3, 4}) EXPECT_EQ(members(detect_communities(g, k, 0)), oracles::percolation(g, k)) << seed;
  }
}

TEST(DetectCommunities, NestingAcrossK) {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    const auto g = oracles::random_digraph(12, 0.35, seed);
    const auto coarse = detect_communities(g, 3, 0);
    for (const auto& fine : detect_communities(g, 4, 0)) {
      bool nested = false;
      for (const auto& c : coarse) {
        nested = nested || std::includes(c.members.begin(), c.members.end(), fine.members.begin(), fine.members.end());
      }
      EXPECT_TRUE(nested);
      EXPECT_GE(fine.members.size(), 4u);
    }
  }
}

TEST(Communities, JsonLinesRoundTrip) {
  const auto found = detect_communities(complete({"a", "b", "c", "d"}), 3, 2);
  std::ostringstream out;
  write_communities(out, found);
  std::istringstream in(out.str());
  const auto back = read_communities(in);
  EXPECT_EQ(back, found);
  const auto frames = by_frame(back, 3);
  EXPECT_TRUE(frames[0].empty());
  EXPECT_EQ(frames[2].size(), 1u);
}
