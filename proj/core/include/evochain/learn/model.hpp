#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evochain/dataset.hpp"
#include "evochain/learn/tree.hpp"

namespace evochain::learn {

enum class ModelKind { tree, forest, adaboost, bagging };

std::string_view to_string(ModelKind kind);
/// Throws ConfigError for unknown names.
ModelKind model_kind_from_string(std::string_view text);

struct ModelParams {
  ModelKind kind = ModelKind::tree;
  /// Base learner for tree, adaboost and bagging.
  TreeParams tree;
  std::size_t n_trees = 100;
  /// Forest features per node; 0 means ceil(sqrt(p)).
  std::size_t mtry = 0;
  /// Forest member trees (grown without a leaf-size floor).
  TreeParams forest_tree{0, 1, true, 0};
  std::size_t n_rounds = 10;
  std::size_t n_bags = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

/// A trained classifier: one or more trees with vote weights.
class Model {
 public:
  ModelKind kind() const { return kind_; }
  const std::vector<DecisionTree>& members() const { return members_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::string& fingerprint() const { return fingerprint_; }
  /// Set when boosting could not beat chance in its first round.
  bool warning() const { return warning_; }

  /// Weighted vote; ties go to the lowest class index.
  std::size_t predict(std::span<const double> row) const;
  /// Throws IntegrityError when `data` has a different schema fingerprint.
  std::vector<std::size_t> predict(const Dataset& data, std::span<const std::size_t> rows) const;

  /// Sorted distinct features used by any member.
  std::vector<std::size_t> used_features() const;

  void save(std::ostream& out) const;
  static Model load(std::istream& in);

 private:
  friend Model train(const Dataset&, std::span<const std::size_t>, std::span<const std::size_t>,
                     const ModelParams&);
  friend Model train_tree(const Dataset&, std::span<const std::size_t>, std::span<const std::size_t>,
                          const ModelParams&);
  friend Model train_forest(const Dataset&, std::span<const std::size_t>, std::span<const std::size_t>,
                            const ModelParams&);
  friend Model train_adaboost(const Dataset&, std::span<const std::size_t>,
                              std::span<const std::size_t>, const ModelParams&);
  friend Model train_bagging(const Dataset&, std::span<const std::size_t>, std::span<const std::size_t>,
                             const ModelParams&);

  ModelKind kind_ = ModelKind::tree;
  std::vector<DecisionTree> members_;
  std::vector<double> weights_;
  std::vector<std::string> classes_;
  std::string fingerprint_;
  bool warning_ = false;
};

/// Training entry points. `rows` selects training rows (all when empty) and
/// `features` the usable features (all when empty).
Model train_tree(const Dataset& data, std::span<const std::size_t> rows = {},
                 std::span<const std::size_t> features = {}, const ModelParams& params = {});
Model train_forest(const Dataset& data, std::span<const std::size_t> rows = {},
                   std::span<const std::size_t> features = {}, const ModelParams& params = {});
/// SAMME boosting by reweighting. A round with zero error ends boosting with
/// that tree alone; a round at or beyond chance error ends boosting, and in
/// the first round leaves the single tree with the warning flag set.
Model train_adaboost(const Dataset& data, std::span<const std::size_t> rows = {},
                     std::span<const std::size_t> features = {}, const ModelParams& params = {});
Model train_bagging(const Dataset& data, std::span<const std::size_t> rows = {},
                    std::span<const std::size_t> features = {}, const ModelParams& params = {});
/// Dispatches on params.kind.
Model train(const Dataset& data, std::span<const std::size_t> rows = {},
            std::span<const std::size_t> features = {}, const ModelParams& params = {});

/// log((1 - err) / err) + log(K - 1).
double samme_weight(double error, std::size_t classes);

/// n draws with replacement from `rows`.
std::vector<std::size_t> bootstrap_rows(std::span<const std::size_t> rows, Rng& rng);

}  // namespace evochain::learn
