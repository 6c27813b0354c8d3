#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "evochain/error.hpp"
#include "evochain/synth.hpp"
#include "fixtures.hpp"

using namespace evochain;
using namespace evochain::synth;

namespace {

std::multiset<ged::Event> ged_labels(const Generated& g) {
  std::multiset<ged::Event> out;
  for (const auto& e : g.ged_truth) out.insert(e.event);
  return out;
}

std::vector<std::vector<std::pair<std::string, std::string>>> arcs(const Generated& g) {
  std::vector<std::vector<std::pair<std::string, std::string>>> out;
  for (const auto& graph : g.graphs) {
    std::vector<std::pair<std::string, std::string>> frame;
    for (const auto& arc : graph.arcs()) frame.emplace_back(graph.node_name(arc.source), graph.node_name(arc.target));
    std::sort(frame.begin(), frame.end());
    out.push_back(std::move(frame));
  }
  return out;
}

Scenario form_split_dissolve() {
  return parse_scenario(R"({"steps": [
    [{"op": "form", "name": "A", "size": 6}],
    [{"op": "split", "group": "A", "parts": [{"name": "L", "size": 3}, {"name": "R", "size": 3}]}],
    [{"op": "dissolve", "group": "L"}, {"op": "dissolve", "group": "R"}]
  ], "initial": []})");
}

}  // namespace

TEST(Generate, ScriptEcho) {
  const auto g = generate(form_split_dissolve(), 1);
  ASSERT_EQ(g.communities.size(), 4u);
  EXPECT_TRUE(g.communities[0].empty());
  EXPECT_EQ(g.communities[1].size(), 1u);
  EXPECT_EQ(g.communities[2].size(), 2u);
  EXPECT_TRUE(g.communities[3].empty());
  const std::multiset<ged::Event> expected{ged::Event::forming, ged::Event::splitting, ged::Event::splitting,
                                           ged::Event::dissolving, ged::Event::dissolving};
  EXPECT_EQ(ged_labels(g), expected);
}

TEST(Generate, SplitPartsPartitionTheParent) {
  const auto g = generate(form_split_dissolve(), 2);
  std::vector<std::string> parts;
  for (const auto& c : g.communities[2]) parts.insert(parts.end(), c.members.begin(), c.members.end());
  std::sort(parts.begin(), parts.end());
  EXPECT_EQ(parts, g.communities[1][0].members);
}

TEST(Generate, ZeroChurnKeepsScriptedMemberships) {
  const auto scenario = fixtures::shipped_scenario("ged_scenario.json");
  const auto g = generate(scenario, 4);
  // A grows by 3 and C shrinks by 3 in the first step; continuing groups keep members.
  auto find = [&](std::size_t frame, std::size_t size) {
    for (const auto& c : g.communities[frame]) {
      if (c.members.size() == size) return c.members;
    }
    return std::vector<std::string>{};
  };
  const auto b0 = find(0, 10);
  const auto b1 = find(1, 10);
  EXPECT_FALSE(b0.empty());
  EXPECT_EQ(b0, b1);
  const auto a0 = find(0, 8);
  const auto a1 = find(1, 11);
  EXPECT_TRUE(std::includes(a1.begin(), a1.end(), a0.begin(), a0.end()));
  const auto c0 = find(0, 12);
  const auto c1 = find(1, 9);
  EXPECT_TRUE(std::includes(c0.begin(), c0.end(), c1.begin(), c1.end()));
}

TEST(Generate, SameSeedSameEdges) {
  const auto scenario = fixtures::shipped_scenario("ged_scenario.json");
  EXPECT_EQ(arcs(generate(scenario, 9)), arcs(generate(scenario, 9)));
  EXPECT_NE(arcs(generate(scenario, 9)), arcs(generate(scenario, 10)));
}

TEST(Generate, EveryMemberHasAnArc) {
  auto scenario = fixtures::shipped_scenario("ged_scenario.json");
  scenario.p_in = 0.05;
  const auto g = generate(scenario, 3);
  for (const auto& graph : g.graphs) {
    for (NodeIndex u = 0; u < graph.node_count(); ++u) {
      EXPECT_GT(graph.out_arcs(u).size() + graph.in_sources(u).size(), 0u);
    }
  }
}

TEST(Scenario, InconsistentScriptNamesTheDirective) {
  try {
    parse_scenario(R"({"initial": [{"name": "A", "size": 6}],
      "steps": [[{"op": "dissolve", "group": "A"}], [{"op": "continue", "group": "A"}]]})");
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("step 1"), std::string::npos) << what;
    EXPECT_NE(what.find("directive 0"), std::string::npos) << what;
  }
}

TEST(Scenario, SplitSizesMustSum) {
  EXPECT_THROW(parse_scenario(R"({"initial": [{"name": "A", "size": 6}],
    "steps": [[{"op": "split", "group": "A", "parts": [{"name": "L", "size": 2}, {"name": "R", "size": 3}]}]]})"),
               ParameterError);
}

TEST(Scenario, SgciOnlyOpsRejectedInGed) {
  EXPECT_THROW(parse_scenario(R"({"initial": [{"name": "A", "size": 60}, {"name": "B", "size": 3}],
    "steps": [[{"op": "attach", "group": "B", "target": "A"}]]})"),
               ParameterError);
}

TEST(Scenario, MalformedJson) { EXPECT_THROW(parse_scenario("{"), ParseError); }

TEST(Scenario, RoundTrip) {
  const auto scenario = fixtures::shipped_scenario("sgci_scenario.json");
  std::stringstream buffer;
  write_scenario(buffer, scenario);
  const auto back = read_scenario(buffer);
  std::stringstream again;
  write_scenario(again, back);
  EXPECT_EQ(buffer.str(), again.str());
  EXPECT_EQ(arcs(generate(scenario, 1)), arcs(generate(back, 1)));
}

TEST(Recovery, GedScenarioIsRecoveredExactly) {
  const auto scenario = fixtures::shipped_scenario("ged_scenario.json");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = generate(scenario, seed);
    std::set<ged::Event> kinds;
    for (const auto& e : g.ged_truth) kinds.insert(e.event);
    EXPECT_EQ(kinds.size(), 7u);
    const auto score = fixtures::ged_recovery(g);
    EXPECT_EQ(score.f, 1.0) << "seed " << seed;
    EXPECT_EQ(score.matched, score.truth);
  }
}

TEST(Recovery, SgciScenarioIsRecoveredExactly) {
  const auto scenario = fixtures::shipped_scenario("sgci_scenario.json");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = generate(scenario, seed);
    std::set<sgci::Event> kinds;
    for (const auto& l : g.sgci_truth) kinds.insert(l.dominating());
    EXPECT_EQ(kinds.size(), sgci::kEventCount);
    const auto score = fixtures::sgci_recovery(g);
    EXPECT_EQ(score.f, 1.0) << "seed " << seed;
  }
}

TEST(Recovery, FDoesNotRiseWithChurn) {
  const auto base = fixtures::shipped_scenario("ged_scenario.json");
  double previous = 2.0;
  for (double churn : {0.0, 0.05, 0.1, 0.2, 0.35, 0.5}) {
    auto scenario = base;
    scenario.churn = churn;
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) total += fixtures::ged_recovery(generate(scenario, seed)).f;
    const double mean = total / 8.0;
    EXPECT_LE(mean, previous + 1e-12) << "churn " << churn;
    previous = mean;
  }
  EXPECT_LT(previous, 1.0);
}

TEST(Interactions, WindowsRecoverSnapshots) {
  const auto g = generate(fixtures::shipped_scenario("ged_scenario.json"), 2);
  const auto log = to_interactions(g, 100);
  std::size_t arcs_total = 0;
  for (const auto& graph : g.graphs) arcs_total += graph.arc_count();
  EXPECT_EQ(log.size(), arcs_total);
  for (const auto& i : log.records()) EXPECT_EQ(i.timestamp % 100, 0);
}

TEST(History, BayesCeilings) {
  EXPECT_NEAR(bayes_accuracy(HistoryRule::shrink_shrink_grow, 1), 8.0 / 9.0, 1e-12);
  EXPECT_EQ(bayes_accuracy(HistoryRule::shrink_shrink_grow, 2), 1.0);
  EXPECT_NEAR(bayes_accuracy(HistoryRule::cycle, 1), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(bayes_accuracy(HistoryRule::cycle, 2), 1.0);
  EXPECT_EQ(bayes_accuracy(HistoryRule::memoryless, 1), bayes_accuracy(HistoryRule::memoryless, 2));
  EXPECT_NEAR(bayes_accuracy(HistoryRule::cycle, 2, 0.15), 0.9, 1e-12);
  EXPECT_NEAR(bayes_accuracy(HistoryRule::cycle, 1, 0.15), 1.0 / 3.0, 1e-12);
}

TEST(History, NoiseBreaksTheRuleAtTheGivenRate) {
  HistoryOptions options;
  options.groups = 200;
  options.frames = 12;
  options.noise = 0.3;
  const auto scenario = history_scenario(options, 8);
  std::size_t broken = 0;
  std::size_t total = 0;
  // Noise draws match the rule a third of the time, so 0.3 * 2/3 = 0.2 break it.
  const std::map<std::pair<Op, Op>, Op> rule{
      {{Op::continue_, Op::continue_}, Op::grow},  {{Op::continue_, Op::grow}, Op::grow},
      {{Op::grow, Op::grow}, Op::shrink},          {{Op::grow, Op::shrink}, Op::shrink},
      {{Op::shrink, Op::shrink}, Op::continue_},   {{Op::shrink, Op::continue_}, Op::shrink},
      {{Op::continue_, Op::shrink}, Op::grow},     {{Op::shrink, Op::grow}, Op::continue_},
      {{Op::grow, Op::continue_}, Op::continue_}};
  for (std::size_t g = 0; g < options.groups; ++g) {
    for (std::size_t n = 2; n < scenario.steps.size(); ++n) {
      const auto expected = rule.at({scenario.steps[n - 2][g].op, scenario.steps[n - 1][g].op});
      broken += scenario.steps[n][g].op != expected ? 1 : 0;
      ++total;
    }
  }
  EXPECT_NEAR(static_cast<double>(broken) / static_cast<double>(total), 0.2, 0.03);
}

TEST(History, CycleRuleIsAFunctionOfTheLastTwoEvents) {
  HistoryOptions options;
  options.groups = 20;
  options.frames = 12;
  options.max_step = 1;
  const auto scenario = history_scenario(options, 5);
  std::map<std::pair<Op, Op>, std::set<Op>> next;
  for (std::size_t g = 0; g < options.groups; ++g) {
    std::vector<Op> ops;
    for (const auto& step : scenario.steps) ops.push_back(step[g].op);
    for (std::size_t i = 2; i < ops.size(); ++i) next[{ops[i - 2], ops[i - 1]}].insert(ops[i]);
  }
  for (const auto& [pair, successors] : next) EXPECT_EQ(successors.size(), 1u);
  EXPECT_EQ(next.size(), 9u);
}

TEST(History, SameSeedSameLabels) {
  HistoryOptions options;
  std::stringstream a;
  std::stringstream b;
  write_scenario(a, history_scenario(options, 11));
  write_scenario(b, history_scenario(options, 11));
  EXPECT_EQ(a.str(), b.str());
}

TEST(History, RuleNames) {
  EXPECT_EQ(history_rule_from_string("cycle"), HistoryRule::cycle);
  EXPECT_THROW(history_rule_from_string("markov"), ConfigError);
}
