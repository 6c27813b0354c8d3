#include "evochain/learn/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>

#include "evochain/error.hpp"
#include "evochain/random.hpp"
#include "json.hpp"

namespace evochain::learn {

using nlohmann::ordered_json;

std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ParameterError("cross-validation needs at least two folds");
  if (k > data.size()) {
    throw ParameterError("cannot split " + std::to_string(data.size()) + " rows into " + std::to_string(k) +
                         " folds");
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> by_class(data.classes.size());
  for (std::size_t r = 0; r < data.size(); ++r) by_class.at(data.labels[r]).push_back(r);
  std::vector<std::size_t> folds(data.size(), 0);
  std::size_t offset = 0;
  for (auto& rows : by_class) {
    shuffle(std::span<std::size_t>(rows), rng);
    for (std::size_t i = 0; i < rows.size(); ++i) folds[rows[i]] = (offset + i) % k;
    offset = (offset + rows.size()) % k;
  }
  return folds;
}

ClassScores f_measure(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassScores s;
  if (tp + fp > 0) s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (s.precision + s.recall > 0.0) s.f = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

std::size_t EvaluationReport::total() const {
  std::size_t sum = 0;
  for (const auto& row : confusion) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

EvaluationReport score_predictions(const std::vector<std::string>& classes,
                                   std::span<const std::size_t> actual,
                                   std::span<const std::size_t> predicted) {
  if (actual.size() != predicted.size()) throw ParameterError("actual and predicted labels differ in length");
  const std::size_t k = classes.size();
  EvaluationReport report;
  report.classes = classes;
  report.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] >= k || predicted[i] >= k) throw ParameterError("class index out of range");
    ++report.confusion[actual[i]][predicted[i]];
  }
  double sum_f = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += report.confusion[o][c];
      fn += report.confusion[c][o];
    }
    report.per_class.push_back(f_measure(report.confusion[c][c], fp, fn));
    sum_f += report.per_class.back().f;
  }
  report.macro_f = k == 0 ? 0.0 : sum_f / static_cast<double>(k);
  return report;
}

EvaluationReport cross_validate(const Dataset& data, const ModelParams& params,
                                const CrossValidationOptions& options, std::span<const std::size_t> features) {
  params.validate();
  const auto folds = stratified_folds(data, options.folds, options.seed);
  std::vector<std::size_t> predicted(data.size(), 0);
  std::set<std::size_t> used;

  MinMaxScaler global;
  if (options.global_normalization) global.fit(data);

  for (std::size_t fold = 0; fold < options.folds; ++fold) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t r = 0; r < data.size(); ++r) (folds[r] == fold ? test_rows : train_rows).push_back(r);
    if (test_rows.empty()) continue;

    Dataset scaled = data;
    if (options.global_normalization) {
      global.transform(scaled);
    } else {
      MinMaxScaler scaler;
      scaler.fit(data, train_rows);
      scaler.transform(scaled);
    }
    ModelParams fold_params = params;
    fold_params.seed = derive_seed(params.seed, fold);
    const Model model = train(scaled, train_rows, features, fold_params);
    for (std::size_t f : model.used_features()) used.insert(f);
    const auto out = model.predict(scaled, test_rows);
    for (std::size_t i = 0; i < test_rows.size(); ++i) predicted[test_rows[i]] = out[i];
  }

  EvaluationReport report = score_predictions(data.classes, data.labels, predicted);
  report.folds = folds;
  report.seed = options.seed;
  report.params = params;
  report.used_features.assign(used.begin(), used.end());
  return report;
}

namespace {

ordered_json tree_json(const TreeParams& p) {
  return {{"max_depth", p.max_depth}, {"min_leaf", p.min_leaf}, {"use_gain_ratio", p.use_gain_ratio}};
}

}  // namespace

void write_report(std::ostream& out, const EvaluationReport& report) {
  ordered_json per_class = ordered_json::object();
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    const auto& s = report.per_class[c];
    per_class[report.classes[c]] = {{"precision", s.precision}, {"recall", s.recall}, {"f", s.f}};
  }
  ordered_json params = {{"classifier", std::string(to_string(report.params.kind))},
                         {"tree", tree_json(report.params.tree)}};
  switch (report.params.kind) {
    case ModelKind::forest:
      params["n_trees"] = report.params.n_trees;
      params["mtry"] = report.params.mtry;
      params["member_tree"] = tree_json(report.params.forest_tree);
      break;
    case ModelKind::adaboost: params["n_rounds"] = report.params.n_rounds; break;
    case ModelKind::bagging: params["n_bags"] = report.params.n_bags; break;
    case ModelKind::tree: break;
  }
  params["seed"] = report.params.seed;
  ordered_json doc = {{"classes", report.classes},
                      {"confusion", report.confusion},
                      {"per_class", per_class},
                      {"macro_f", report.macro_f},
                      {"seed", report.seed},
                      {"params", params},
                      {"folds", report.folds}};
  out << doc.dump(2) << '\n';
}

}  // namespace evochain::learn
