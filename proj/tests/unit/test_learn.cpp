#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "evochain/error.hpp"
#include "evochain/learn/evaluation.hpp"
#include "evochain/learn/model.hpp"
#include "evochain/learn/selection.hpp"
#include "evochain/learn/tree.hpp"
#include "evochain/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace evochain;
using namespace evochain::learn;

namespace {

Dataset tiny(std::vector<std::vector<double>> rows, std::vector<std::string> labels) {
  Dataset d;
  for (std::size_t f = 0; f < rows.front().size(); ++f) d.features.push_back({"x" + std::to_string(f)});
  std::set<std::string> classes(labels.begin(), labels.end());
  d.classes.assign(classes.begin(), classes.end());
  d.rows = std::move(rows);
  for (const auto& l : labels) {
    d.labels.push_back(static_cast<std::size_t>(std::find(d.classes.begin(), d.classes.end(), l) - d.classes.begin()));
  }
  return d;
}

double accuracy(const Model& m, const Dataset& d) {
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  const auto predicted = m.predict(d, rows);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) hits += predicted[i] == d.labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

ModelParams kind(ModelKind k, std::uint64_t seed = 1) {
  ModelParams p;
  p.kind = k;
  p.seed = seed;
  return p;
}

std::vector<std::size_t> predictions(const Model& m, const Dataset& d) {
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  return m.predict(d, rows);
}

}  // namespace

TEST(Tree, SingleFeatureStump) {
  const auto d = tiny({{0}, {1}}, {"A", "B"});
  ModelParams p;
  p.tree.min_leaf = 1;
  const auto m = train_tree(d, {}, {}, p);
  const auto& root = m.members()[0].nodes()[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_DOUBLE_EQ(root.threshold, 0.5);
  EXPECT_EQ(accuracy(m, d), 1.0);
}

TEST(Tree, UninformativeRowsGiveMajorityLeaf) {
  const auto d = tiny({{1, 1}, {1, 1}, {1, 1}}, {"A", "A", "B"});
  const auto m = train_tree(d);
  ASSERT_EQ(m.members()[0].nodes().size(), 1u);
  EXPECT_EQ(m.classes()[m.members()[0].nodes()[0].label], "A");
}

TEST(Tree, MajorityTieGoesToSmallestLabel) {
  const auto d = tiny({{1}, {1}}, {"B", "A"});
  const auto m = train_tree(d);
  EXPECT_EQ(m.classes()[m.predict(std::vector<double>{1})], "A");
}

TEST(Tree, PureDataIsOneLeaf) {
  const auto d = tiny({{0}, {5}, {9}}, {"only", "only", "only"});
  const auto m = train_tree(d);
  EXPECT_EQ(m.members()[0].nodes().size(), 1u);
}

TEST(Tree, CategoricalSplitIsMultiway) {
  Dataset d;
  d.features = {{"e", FeatureKind::categorical, 0, {"p", "q", "r"}}};
  d.classes = {"x", "y", "z"};
  for (std::size_t i = 0; i < 12; ++i) {
    d.rows.push_back({static_cast<double>(i % 3)});
    d.labels.push_back(i % 3);
  }
  const auto m = train_tree(d);
  EXPECT_EQ(m.members()[0].nodes()[0].children.size(), 3u);
  EXPECT_EQ(accuracy(m, d), 1.0);
}

TEST(Tree, RootSplitMatchesGainRatioOracle) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    const std::size_t rows = 4 + uniform_index(rng, 13);
    const std::size_t features = 1 + uniform_index(rng, 4);
    const auto d = fixtures::random_binary(rows, features, 2 + uniform_index(rng, 2), seed * 7 + 1);
    const auto expected = oracles::root_split(d, 2);
    const auto m = train_tree(d);
    const int actual = m.members()[0].nodes()[0].feature;
    if (expected.feature < 0) {
      EXPECT_EQ(actual, -1) << "seed " << seed;
      continue;
    }
    ASSERT_GE(actual, 0) << "seed " << seed;
    const double best = expected.ratio[static_cast<std::size_t>(expected.feature)];
    EXPECT_NEAR(expected.ratio[static_cast<std::size_t>(actual)], best, 1e-9) << "seed " << seed;
    ++checked;
  }
  EXPECT_GT(checked, 100u);
}

TEST(Tree, DepthLimit) {
  const auto d = fixtures::separable(80, 4, 1, 0, 3);
  ModelParams p;
  p.tree.max_depth = 1;
  EXPECT_LE(train_tree(d, {}, {}, p).members()[0].depth(), 1u);
}

TEST(Entropy, KnownValues) {
  EXPECT_DOUBLE_EQ(entropy(std::vector<double>{1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(entropy(std::vector<double>{4, 0}), 0.0);
  EXPECT_DOUBLE_EQ(entropy(std::vector<double>{1, 1, 1, 1}), 2.0);
}

TEST(Forest, SeparableResubstitution) {
  const auto d = fixtures::separable(200, 2, 2, 2, 5);
  auto p = kind(ModelKind::forest);
  p.n_trees = 30;
  EXPECT_GE(accuracy(train_forest(d, {}, {}, p), d), 0.99);
}

TEST(Forest, SameSeedSamePredictions) {
  const auto d = fixtures::separable(120, 3, 1, 3, 6);
  auto p = kind(ModelKind::forest, 17);
  p.n_trees = 15;
  const auto noisy = fixtures::separable(50, 3, 0, 4, 7);
  Dataset probe = d;
  probe.rows = noisy.rows;
  probe.labels = noisy.labels;
  EXPECT_EQ(predictions(train_forest(d, {}, {}, p), probe), predictions(train_forest(d, {}, {}, p), probe));
}

TEST(Forest, OneTreeWithAllFeaturesIsABootstrapTree) {
  const auto d = fixtures::separable(60, 3, 1, 2, 8);
  auto p = kind(ModelKind::forest, 4);
  p.n_trees = 1;
  p.mtry = d.feature_count();
  const auto forest = train_forest(d, {}, {}, p);
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::size_t> features(d.feature_count());
  std::iota(features.begin(), features.end(), 0);
  Rng rng(derive_seed(4, 0));
  const auto sample = bootstrap_rows(rows, rng);
  const auto tree = DecisionTree::fit(d, sample, {}, features, p.forest_tree, &rng);
  for (const auto& row : fixtures::separable(40, 3, 0, 3, 9).rows) {
    EXPECT_EQ(forest.members()[0].predict(row), tree.predict(row));
  }
}

TEST(AdaBoost, SeparableDataStopsAfterOnePerfectTree) {
  const auto d = fixtures::separable(60, 2, 1, 0, 10);
  const auto m = train_adaboost(d, {}, {}, kind(ModelKind::adaboost));
  EXPECT_EQ(m.members().size(), 1u);
  EXPECT_EQ(accuracy(m, d), 1.0);
}

TEST(AdaBoost, SammeWeight) {
  EXPECT_NEAR(samme_weight(0.25, 2), std::log(3.0), 1e-12);
  EXPECT_NEAR(samme_weight(0.5, 4), std::log(3.0), 1e-12);
  EXPECT_THROW(samme_weight(0.0, 2), ParameterError);
}

TEST(AdaBoost, DeterministicCommittee) {
  const auto d = fixtures::random_binary(40, 4, 3, 12);
  auto p = kind(ModelKind::adaboost, 3);
  p.tree.max_depth = 1;
  const auto a = train_adaboost(d, {}, {}, p);
  const auto b = train_adaboost(d, {}, {}, p);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(predictions(a, d), predictions(b, d));
}

TEST(AdaBoost, ChanceLevelFirstRoundKeepsOneTreeWithWarning) {
  const auto d = tiny({{1}, {1}, {1}, {1}}, {"A", "A", "B", "B"});
  const auto m = train_adaboost(d, {}, {}, kind(ModelKind::adaboost));
  EXPECT_EQ(m.members().size(), 1u);
  EXPECT_TRUE(m.warning());
}

TEST(Bagging, SeparableResubstitution) {
  const auto d = fixtures::separable(200, 2, 2, 2, 13);
  EXPECT_GE(accuracy(train_bagging(d, {}, {}, kind(ModelKind::bagging)), d), 0.99);
}

TEST(Bagging, OneBagIsABootstrapTree) {
  const auto d = fixtures::separable(60, 3, 1, 2, 14);
  auto p = kind(ModelKind::bagging, 6);
  p.n_bags = 1;
  const auto bag = train_bagging(d, {}, {}, p);
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<std::size_t> features(d.feature_count());
  std::iota(features.begin(), features.end(), 0);
  Rng rng(derive_seed(6, 0));
  const auto tree = DecisionTree::fit(d, bootstrap_rows(rows, rng), {}, features, p.tree);
  for (const auto& row : d.rows) EXPECT_EQ(bag.predict(row), tree.predict(row));
}

TEST(Model, VoteTieGoesToSmallestLabel) {
  const auto d = tiny({{0}, {1}}, {"A", "B"});
  const std::string text = R"({"format":"evochain-model","version":1,"kind":"bagging","classes":["A","B"],)"
                           R"("fingerprint":")" + d.fingerprint() + R"(","warning":false,"weights":[1.0,1.0],)"
                           R"("members":[[{"feature":-1,"categorical":false,"threshold":0.0,"children":[],"label":1}],)"
                           R"([{"feature":-1,"categorical":false,"threshold":0.0,"children":[],"label":0}]]})";
  std::istringstream in(text);
  EXPECT_EQ(Model::load(in).predict(std::vector<double>{0}), 0u);
}

TEST(Model, SaveLoadPreservesPredictions) {
  const auto d = fixtures::separable(80, 3, 1, 2, 15);
  auto p = kind(ModelKind::forest, 2);
  p.n_trees = 5;
  const auto m = train_forest(d, {}, {}, p);
  std::stringstream buffer;
  m.save(buffer);
  const auto back = Model::load(buffer);
  EXPECT_EQ(predictions(back, d), predictions(m, d));
}

TEST(Model, RejectsMismatchedSchema) {
  const auto d = fixtures::separable(40, 2, 1, 1, 16);
  const auto m = train_tree(d);
  auto other = d;
  other.features[0].name = "different";
  std::vector<std::size_t> rows{0};
  EXPECT_THROW(m.predict(other, rows), IntegrityError);
}

TEST(Model, ParsesKinds) {
  EXPECT_EQ(model_kind_from_string("adaboost"), ModelKind::adaboost);
  EXPECT_THROW(model_kind_from_string("svm"), ConfigError);
}

TEST(StratifiedFolds, SixtyFortySplit) {
  const auto d = tiny(std::vector<std::vector<double>>(100, {0.0}),
                      [] {
                        std::vector<std::string> l(100, "a");
                        for (std::size_t i = 60; i < 100; ++i) l[i] = "b";
                        return l;
                      }());
  const auto folds = stratified_folds(d, 10, 3);
  std::vector<std::size_t> a(10, 0);
  std::vector<std::size_t> b(10, 0);
  for (std::size_t i = 0; i < 100; ++i) ++(d.labels[i] == 0 ? a : b)[folds[i]];
  for (std::size_t f = 0; f < 10; ++f) {
    EXPECT_EQ(a[f], 6u);
    EXPECT_EQ(b[f], 4u);
  }
  EXPECT_EQ(stratified_folds(d, 10, 3), folds);
}

TEST(StratifiedFolds, SmallClassSpreadsOut) {
  std::vector<std::string> labels(30, "big");
  labels[3] = labels[11] = labels[20] = "small";
  const auto d = tiny(std::vector<std::vector<double>>(30, {0.0}), labels);
  const auto folds = stratified_folds(d, 10, 5);
  std::set<std::size_t> seen{folds[3], folds[11], folds[20]};
  EXPECT_EQ(seen.size(), 3u);
}

TEST(StratifiedFolds, PerClassCountsDifferByAtMostOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = fixtures::random_binary(37 + seed, 1, 4, seed);
    const std::size_t k = 2 + seed % 9;
    const auto folds = stratified_folds(d, k, seed);
    for (std::size_t c = 0; c < 4; ++c) {
      std::vector<std::size_t> counts(k, 0);
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.labels[i] == c) ++counts[folds[i]];
      }
      EXPECT_LE(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()),
                1u);
    }
  }
}

TEST(StratifiedFolds, MoreFoldsThanRowsIsAnError) {
  EXPECT_THROW(stratified_folds(fixtures::random_binary(5, 1, 2, 1), 10, 1), ParameterError);
}

TEST(FMeasure, Arithmetic) {
  const auto s = f_measure(2, 1, 3);
  EXPECT_DOUBLE_EQ(s.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.recall, 0.4);
  EXPECT_EQ(s.f, 0.5);
  EXPECT_EQ(f_measure(0, 0, 4).f, 0.0);
}

TEST(ScorePredictions, ConstantPredictorOnBalancedClasses) {
  const std::vector<std::size_t> actual{0, 0, 1, 1};
  const std::vector<std::size_t> predicted{0, 0, 0, 0};
  const auto r = score_predictions({"a", "b"}, actual, predicted);
  EXPECT_NEAR(r.per_class[0].f, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(r.per_class[1].f, 0.0);
  EXPECT_EQ(r.total(), 4u);
}

TEST(CrossValidate, ReportInvariants) {
  const auto d = fixtures::separable(150, 3, 1, 3, 21);
  for (auto k : {ModelKind::tree, ModelKind::bagging}) {
    const auto r = cross_validate(d, kind(k), {10, 4, false});
    EXPECT_EQ(r.total(), d.size());
    std::vector<std::size_t> per_fold(10, 0);
    for (std::size_t f : r.folds) ++per_fold[f];
    EXPECT_EQ(std::accumulate(per_fold.begin(), per_fold.end(), std::size_t{0}), d.size());
    for (std::size_t c = 0; c < r.classes.size(); ++c) {
      std::size_t tp = r.confusion[c][c];
      std::size_t row = 0;
      std::size_t col = 0;
      for (std::size_t j = 0; j < r.classes.size(); ++j) {
        row += r.confusion[c][j];
        col += r.confusion[j][c];
      }
      EXPECT_EQ(row, 50u);
      const double p = col ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
      const double rc = static_cast<double>(tp) / static_cast<double>(row);
      const double f = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
      EXPECT_NEAR(r.per_class[c].f, f, 1e-12);
    }
  }
}

TEST(CrossValidate, PerfectOnSeparableData) {
  const auto d = fixtures::separable(100, 2, 1, 0, 22);
  const auto r = cross_validate(d, kind(ModelKind::tree), {10, 1, false});
  for (const auto& s : r.per_class) EXPECT_EQ(s.f, 1.0);
}

TEST(CrossValidate, SameSeedSameReport) {
  const auto d = fixtures::separable(90, 3, 1, 2, 23);
  auto p = kind(ModelKind::forest, 9);
  p.n_trees = 10;
  std::ostringstream a;
  std::ostringstream b;
  write_report(a, cross_validate(d, p, {5, 9, false}));
  write_report(b, cross_validate(d, p, {5, 9, false}));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Selection, DropsNoise) {
  const auto d = fixtures::separable(80, 2, 1, 1, 31);
  SelectionOptions options;
  options.cv = {5, 1, false};
  const auto r = backward_feature_elimination(d, kind(ModelKind::tree), options);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{0}));
  EXPECT_EQ(r.final_score, 1.0);
}

TEST(Selection, DuplicatesCollapseToOne) {
  auto d = fixtures::separable(60, 2, 1, 0, 32);
  d.features.push_back({"copy1"});
  d.features.push_back({"copy2"});
  for (auto& row : d.rows) {
    row.push_back(row[0]);
    row.push_back(row[0]);
  }
  SelectionOptions options;
  options.cv = {5, 1, false};
  const auto r = backward_feature_elimination(d, kind(ModelKind::tree), options);
  EXPECT_EQ(r.selected.size(), 1u);
  EXPECT_GE(r.final_score, r.initial_score);
}

TEST(Selection, TiesRemoveTheEarliestFeature) {
  auto d = fixtures::separable(60, 2, 1, 0, 32);
  d.features.push_back({"copy1"});
  d.features.push_back({"copy2"});
  for (auto& row : d.rows) {
    row.push_back(row[0]);
    row.push_back(row[0]);
  }
  SelectionOptions options;
  options.cv = {5, 1, false};
  const auto r = backward_feature_elimination(d, kind(ModelKind::tree), options);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{2}));
  ASSERT_EQ(r.trajectory.size(), 2u);
  EXPECT_EQ(r.trajectory[0].name, d.features[0].name);
  EXPECT_EQ(r.trajectory[1].name, "copy1");
}

TEST(Selection, InfiniteEpsilonKeepsEverything) {
  const auto d = fixtures::separable(60, 2, 1, 2, 33);
  SelectionOptions options;
  options.cv = {5, 1, false};
  options.epsilon = std::numeric_limits<double>::infinity();
  const auto r = backward_feature_elimination(d, kind(ModelKind::tree), options);
  EXPECT_EQ(r.selected.size(), 3u);
  EXPECT_TRUE(r.trajectory.empty());
}
