#include <gtest/gtest.h>

#include <sstream>

#include "evochain/error.hpp"
#include "evochain/sgci.hpp"

using namespace evochain;
using namespace evochain::sgci;

namespace {

using Members = std::vector<std::string>;

Members block(const std::string& prefix, std::size_t n, std::size_t offset = 0) {
  Members m;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", offset + i);
    m.push_back(prefix + buf);
  }
  std::sort(m.begin(), m.end());
  return m;
}


std::vector<std::vector<Community>> frames_of(std::vector<std::vector<Members>> raw) {
  std::vector<std::vector<Community>> frames;
  for (std::size_t f = 0; f < raw.size(); ++f) {
    std::vector<Community> frame;
    for (auto& m : raw[f]) frame.push_back({f, 0, m});
    assign_community_ids(frame);
    frames.push_back(frame);
  }
  return frames;
}

const StateLabel* label_at(const Result& r, GroupRef ref) {
  for (const auto& l : r.labels) {
    if (l.group == ref) return &l;
  }
  return nullptr;
}

}  // namespace

TEST(MatchScore, Examples) {
  EXPECT_EQ(match_score({"a", "b"}, {"a", "b"}), 1.0);
  EXPECT_EQ(match_score({"a", "b"}, {"c", "d"}), 0.0);
  EXPECT_EQ(match_score({"a", "b", "c"}, {"b", "c", "d", "e"}), 0.5);
  EXPECT_THROW(match_score({}, {"a"}), ParameterError);
}

TEST(MatchScore, IsSymmetric) {
  const auto a = block("n", 7);
  const auto b = block("n", 9, 3);
  EXPECT_EQ(match_score(a, b), match_score(b, a));
}

TEST(MatchGroups, ThresholdIsInclusive) {
  const std::vector<Community> earlier{{0, 0, {"a", "b", "c"}}};
  const std::vector<Community> later{{1, 0, {"b", "c", "d", "e"}}};
  EXPECT_EQ(match_groups(earlier, later, 0.5).size(), 1u);
  EXPECT_TRUE(match_groups(earlier, later, 0.65).empty());
  EXPECT_THROW(match_groups(earlier, later, 0.0), ParameterError);
}

TEST(MatchGroups, ManyToMany) {
  const std::vector<Community> earlier{{0, 0, block("n", 4)}};
  const std::vector<Community> later{{1, 0, block("n", 2)}, {1, 1, block("n", 2, 2)}};
  EXPECT_EQ(match_groups(earlier, later, 0.4).size(), 2u);
}

TEST(IdentifyStable, LengthBoundary) {
  const std::vector<std::size_t> counts{1, 1, 1};
  const std::vector<std::vector<Link>> links{{{0, 0, 1.0}}, {{0, 0, 1.0}}};
  EXPECT_EQ(identify_stable(counts, links, 3).size(), 1u);
  const std::vector<std::size_t> short_counts{1, 1};
  const std::vector<std::vector<Link>> short_links{{{0, 0, 1.0}}};
  EXPECT_TRUE(identify_stable(short_counts, short_links, 3).empty());
  EXPECT_THROW(identify_stable(counts, links, 1), ParameterError);
}

TEST(IdentifyStable, BranchesShareAPrefix) {
  const std::vector<std::size_t> counts{1, 1, 2};
  const std::vector<std::vector<Link>> links{{{0, 0, 1.0}}, {{0, 0, 0.5}, {0, 1, 0.5}}};
  const auto stable = identify_stable(counts, links, 3);
  ASSERT_EQ(stable.size(), 2u);
  EXPECT_EQ(stable[0].states[1], stable[1].states[1]);
  EXPECT_NE(stable[0].states[2], stable[1].states[2]);
}

TEST(IdentifyStable, RaisingMinimumNeverAddsGroups) {
  const std::vector<std::size_t> counts{2, 2, 2, 2, 2};
  const std::vector<std::vector<Link>> links{
      {{0, 0, 1}, {1, 1, 1}}, {{0, 0, 1}, {1, 0, 0.5}}, {{0, 0, 1}, {0, 1, 0.5}}, {{1, 1, 1}}};
  std::size_t previous = identify_stable(counts, links, 2).size();
  for (std::size_t m = 3; m <= 6; ++m) {
    const std::size_t now = identify_stable(counts, links, m).size();
    EXPECT_LE(now, previous);
    previous = now;
  }
}

TEST(ClassifyEvents, Examples) {
  EXPECT_EQ(classify_events({10, {{10, true, {10}}}}, 0.05), (EventSet{Event::constancy}));
  EXPECT_EQ(classify_events({10, {{12, true, {10}}}}, 0.05), (EventSet{Event::change_size}));
  EXPECT_EQ(classify_events({10, {{5, true, {10}}, {5, true, {10}}}}, 0.05), (EventSet{Event::split}));
  EXPECT_EQ(classify_events({100, {{97, true, {100}}, {3, false, {100}}}}, 0.05), (EventSet{Event::deletion}));
  EXPECT_EQ(classify_events({10, {}}, 0.05), (EventSet{Event::decay}));
  EXPECT_EQ(classify_events({5, {{10, true, {5, 5}}}}, 0.05), (EventSet{Event::merge}));
  EXPECT_EQ(classify_events({97, {{100, true, {97, 3}}}}, 0.05), (EventSet{Event::addition}));
  EXPECT_EQ(classify_events({10, {{5, true, {10}}, {10, true, {10, 5}}}}, 0.05), (EventSet{Event::split_merge}));
}

TEST(DominatingEvent, Examples) {
  EXPECT_EQ(dominating_event({Event::constancy, Event::addition}), Event::constancy);
  EXPECT_EQ(dominating_event({Event::merge, Event::deletion}), Event::merge);
  EXPECT_EQ(dominating_event({Event::decay}), Event::decay);
  EXPECT_THROW(dominating_event({}), ParameterError);
}

TEST(DominatingEvent, AllSubsetsFollowThePriorityList) {
  const std::vector<std::string> ranking{"constancy", "change_size", "split", "merge",
                                         "addition", "deletion", "split_merge", "decay"};
  for (unsigned bits = 1; bits < 256; ++bits) {
    const auto set = EventSet::from_bits(static_cast<std::uint8_t>(bits));
    std::size_t expected = 0;
    while (!(bits & (1u << expected))) ++expected;
    EXPECT_EQ(to_string(dominating_event(set)), ranking[expected]);
    EXPECT_EQ(priority(dominating_event(set)), static_cast<int>(expected) + 1);
  }
}

TEST(DetectEvents, ConstantGroupOverThreeFrames) {
  const auto g = block("n", 6);
  const auto r = detect_events(frames_of({{g}, {g}, {g}}), {});
  ASSERT_EQ(r.stable.size(), 1u);
  ASSERT_EQ(r.labels.size(), 2u);
  for (const auto& l : r.labels) EXPECT_EQ(l.dominating(), Event::constancy);
}

TEST(DetectEvents, SplitAtThePlantedFrame) {
  const auto whole = block("n", 10);
  const auto left = block("n", 5);
  const auto right = block("n", 5, 5);
  const auto r = detect_events(frames_of({{whole}, {whole}, {left, right}, {left, right}}), {});
  const auto* l = label_at(r, {1, 0});
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->dominating(), Event::split);
}

TEST(DetectEvents, DisappearingGroupDecays) {
  const auto g = block("n", 6);
  const auto other = block("m", 6);
  const auto r = detect_events(frames_of({{g}, {g}, {g}, {other}}), {});
  const auto* l = label_at(r, {2, 0});
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->dominating(), Event::decay);
  EXPECT_FALSE(l->successor.has_value());
}

TEST(DetectEvents, SmallFragmentLeavingIsDeletion) {
  const auto big = block("n", 100);
  const auto kept = block("n", 97);
  const auto fragment = block("n", 3, 97);
  const auto r = detect_events(frames_of({{big}, {big}, {kept, fragment}, {kept, fragment}}), {});
  const auto* l = label_at(r, {1, 0});
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->dominating(), Event::deletion);
}

TEST(Labels, JsonLinesRoundTrip) {
  const auto whole = block("n", 10);
  const auto r = detect_events(frames_of({{whole}, {whole}, {block("n", 5), block("n", 5, 5)}, {block("n", 5)}}), {});
  std::ostringstream out;
  write_labels(out, r.labels);
  std::istringstream in(out.str());
  EXPECT_EQ(read_labels(in), r.labels);
  std::ostringstream stable;
  write_stable(stable, r.stable);
  std::istringstream stable_in(stable.str());
  EXPECT_EQ(read_stable(stable_in), r.stable);
}

TEST(Parameters, Validation) {
  EXPECT_THROW((Parameters{1.5, 3, 0.05}).validate(), ParameterError);
  EXPECT_THROW((Parameters{0.5, 1, 0.05}).validate(), ParameterError);
  EXPECT_NO_THROW((Parameters{0.4, 3, 0.05}).validate());
}

TEST(SgciEvents, LabelsRoundTrip) {
  for (Event e : all_events()) EXPECT_EQ(event_from_string(to_string(e)), e);
}
