#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "evochain/dataset.hpp"
#include "evochain/learn/evaluation.hpp"

namespace evochain::learn {

struct SelectionOptions {
  CrossValidationOptions cv;
  /// A removal must raise macro-F by at least this much; infinity disables
  /// elimination.
  double epsilon = 0.0;
};

struct SelectionStep {
  std::size_t removed = 0;
  std::string name;
  double score = 0.0;
};

struct SelectionResult {
  /// Surviving feature indices, ascending.
  std::vector<std::size_t> selected;
  double initial_score = 0.0;
  double final_score = 0.0;
  std::vector<SelectionStep> trajectory;
  /// Surviving features per age (frames before the focal state).
  std::map<std::size_t, std::size_t> age_histogram;
  /// Cross-validation runs actually trained (cache misses).
  std::size_t evaluations = 0;
};

/// Greedy backward elimination on cross-validated macro-F. Each step drops
/// the feature whose removal scores best, the schema-earliest (oldest state)
/// one on ties, and stops once the best removal gains less than epsilon.
/// Tree, bagging and boosting runs are reused for any subset that still
/// contains every feature their models used, since removing an unused feature
/// cannot change them.
SelectionResult backward_feature_elimination(const Dataset& data, const ModelParams& params,
                                             const SelectionOptions& options);

/// JSON {selected:[names], initial_score, final_score, trajectory, age_histogram}.
void write_selection(std::ostream& out, const Dataset& data, const SelectionResult& result);

}  // namespace evochain::learn
