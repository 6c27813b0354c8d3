#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evochain/dataset.hpp"
#include "evochain/random.hpp"

namespace evochain::learn {

struct TreeParams {
  /// 0 means unlimited.
  std::size_t max_depth = 0;
  std::size_t min_leaf = 2;
  bool use_gain_ratio = true;
  /// Features drawn per node without replacement; 0 means all active ones.
  std::size_t mtry = 0;
};

struct TreeNode {
  /// -1 for a leaf.
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
  /// Numeric: {<= threshold, > threshold}; categorical: one per category.
  std::vector<std::size_t> children;
  std::size_t label = 0;
};

/// Information-gain decision tree over numeric thresholds and multiway
/// categorical splits. Numeric candidates are midpoints of adjacent distinct
/// values; each feature's best threshold is picked by gain and features are
/// compared by gain ratio (or gain). Ties go to the lowest feature index and
/// leaves predict the heaviest class, ties to the lowest class index.
class DecisionTree {
 public:
  std::size_t predict(std::span<const double> row) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;
  /// Sorted distinct features used by internal nodes.
  std::vector<std::size_t> used_features() const;

  static DecisionTree from_nodes(std::vector<TreeNode> nodes);

  /// `rows` may repeat indices (bootstrap samples). `weights` is parallel to
  /// `rows` or empty for unit weights. Only `features` are considered;
  /// `rng` is required when params.mtry restricts the candidates.
  static DecisionTree fit(const Dataset& data, std::span<const std::size_t> rows,
                          std::span<const double> weights, std::span<const std::size_t> features,
                          const TreeParams& params, Rng* rng = nullptr);

 private:
  std::vector<TreeNode> nodes_;
};

/// Entropy in bits of a class-weight histogram.
double entropy(std::span<const double> class_weights);

}  // namespace evochain::learn
