#include "evochain/learn/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "evochain/error.hpp"
#include "json.hpp"

namespace evochain::learn {

namespace {

struct CachedRun {
  std::vector<std::size_t> features;  // the evaluated set T
  std::vector<std::size_t> used;      // U_T, a subset of T
  double score = 0.0;
};

class Evaluator {
 public:
  Evaluator(const Dataset& data, const ModelParams& params, const CrossValidationOptions& cv)
      : data_(data), params_(params), cv_(cv), reusable_(params.kind != ModelKind::forest) {}

  double score(const std::vector<std::size_t>& features) {
    if (reusable_) {
      for (const auto& run : cache_) {
        if (std::includes(features.begin(), features.end(), run.used.begin(), run.used.end()) &&
            std::includes(run.features.begin(), run.features.end(), features.begin(), features.end())) {
          return run.score;
        }
      }
    }
    ++evaluations_;
    const auto report = cross_validate(data_, params_, cv_, features);
    if (reusable_) cache_.push_back({features, report.used_features, report.macro_f});
    return report.macro_f;
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const Dataset& data_;
  const ModelParams& params_;
  const CrossValidationOptions& cv_;
  bool reusable_;
  std::vector<CachedRun> cache_;
  std::size_t evaluations_ = 0;
};

}  // namespace

SelectionResult backward_feature_elimination(const Dataset& data, const ModelParams& params,
                                             const SelectionOptions& options) {
  if (data.feature_count() < 2) throw ParameterError("feature elimination needs at least two features");
  if (std::isnan(options.epsilon)) throw ParameterError("epsilon must be a number");

  Evaluator evaluator(data, params, options.cv);
  SelectionResult result;
  result.selected.resize(data.feature_count());
  std::iota(result.selected.begin(), result.selected.end(), 0);
  double current = evaluator.score(result.selected);
  result.initial_score = current;

  while (result.selected.size() > 1 && std::isfinite(options.epsilon)) {
    double best_score = -1.0;
    std::size_t best_position = 0;
    for (std::size_t i = 0; i < result.selected.size(); ++i) {
      std::vector<std::size_t> candidate = result.selected;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(i));
      const double s = evaluator.score(candidate);
      // Strict > removes the schema-earliest feature among equal scores.
      if (s > best_score) {
        best_score = s;
        best_position = i;
      }
    }
    if (best_score - current < options.epsilon) break;
    const std::size_t removed = result.selected[best_position];
    result.selected.erase(result.selected.begin() + static_cast<std::ptrdiff_t>(best_position));
    result.trajectory.push_back({removed, data.features[removed].name, best_score});
    current = best_score;
  }
  result.final_score = current;
  for (std::size_t f : result.selected) ++result.age_histogram[data.features[f].age];
  result.evaluations = evaluator.evaluations();
  return result;
}

void write_selection(std::ostream& out, const Dataset& data, const SelectionResult& result) {
  using nlohmann::ordered_json;
  ordered_json selected = ordered_json::array();
  for (std::size_t f : result.selected) selected.push_back(data.features[f].name);
  ordered_json trajectory = ordered_json::array();
  for (const auto& step : result.trajectory) {
    trajectory.push_back({{"removed", step.name}, {"score", step.score}});
  }
  ordered_json ages = ordered_json::object();
  for (const auto& [age, count] : result.age_histogram) ages[std::to_string(age)] = count;
  ordered_json doc = {{"selected", selected},
                      {"initial_score", result.initial_score},
                      {"final_score", result.final_score},
                      {"trajectory", trajectory},
                      {"age_histogram", ages}};
  out << doc.dump(2) << '\n';
}

}  // namespace evochain::learn
