#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evochain/dataset.hpp"
#include "evochain/learn/model.hpp"

namespace evochain::learn {

/// Fold index per row. Each class is shuffled and dealt round-robin, with the
/// dealing position carried over from one class to the next, so per-class
/// fold counts differ by at most one. Throws ParameterError when k < 2 or
/// k exceeds the number of rows.
std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Precision, recall and their harmonic mean; each is 0 when undefined.
ClassScores f_measure(std::size_t tp, std::size_t fp, std::size_t fn);

struct EvaluationReport {
  std::vector<std::string> classes;
  /// confusion[actual][predicted].
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<ClassScores> per_class;
  double macro_f = 0.0;
  std::vector<std::size_t> folds;
  std::uint64_t seed = 0;
  ModelParams params;
  /// Sorted union of features used by the fold models.
  std::vector<std::size_t> used_features;

  std::size_t total() const;
};

/// Confusion matrix and scores for parallel actual/predicted class indices.
EvaluationReport score_predictions(const std::vector<std::string>& classes,
                                   std::span<const std::size_t> actual,
                                   std::span<const std::size_t> predicted);

struct CrossValidationOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  /// Fit min-max scaling on the whole dataset instead of per training fold.
  bool global_normalization = false;
};

/// Stratified k-fold cross-validation. Each fold fits scaling on its
/// training rows, trains with a seed derived from the fold number and scores
/// the held-out rows into one pooled confusion matrix. `features` restricts
/// the learner (all features when empty).
EvaluationReport cross_validate(const Dataset& data, const ModelParams& params,
                                const CrossValidationOptions& options,
                                std::span<const std::size_t> features = {});

/// JSON {classes, confusion, per_class:{label:{precision,recall,f}}, macro_f,
/// seed, params}.
void write_report(std::ostream& out, const EvaluationReport& report);

}  // namespace evochain::learn
