#include "evochain/learn/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evochain/error.hpp"

namespace evochain::learn {

namespace {

constexpr double kMinGain = 1e-12;

struct Sample {
  std::size_t row;
  double weight;
};

struct Split {
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
  double score = 0.0;
};

class Builder {
 public:
  Builder(const Dataset& data, const TreeParams& params, Rng* rng)
      : data_(data), params_(params), rng_(rng), classes_(data.classes.size()) {}

  std::vector<TreeNode> run(std::vector<Sample> samples, std::span<const std::size_t> features) {
    features_.assign(features.begin(), features.end());
    grow(std::move(samples), 0);
    return std::move(nodes_);
  }

 private:
  std::vector<double> histogram(const std::vector<Sample>& samples) const {
    std::vector<double> counts(classes_, 0.0);
    for (const auto& s : samples) counts[data_.labels[s.row]] += s.weight;
    return counts;
  }

  static std::size_t majority(const std::vector<double>& counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
      if (counts[c] > counts[best]) best = c;
    }
    return best;
  }

  std::size_t grow(std::vector<Sample> samples, std::size_t depth) {
    const std::size_t index = nodes_.size();
    nodes_.emplace_back();
    const auto counts = histogram(samples);
    nodes_[index].label = majority(counts);

    const bool pure = std::count_if(counts.begin(), counts.end(), [](double w) { return w > 0.0; }) <= 1;
    const bool deep = params_.max_depth != 0 && depth >= params_.max_depth;
    if (pure || deep || samples.size() < 2 * params_.min_leaf) return index;

    const double parent_entropy = entropy(counts);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    Split best;
    for (std::size_t f : candidates()) {
      Split split = data_.features[f].kind == FeatureKind::categorical
                        ? categorical_split(samples, f, parent_entropy, total)
                        : numeric_split(samples, f, parent_entropy, total);
      if (split.feature >= 0 && (best.feature < 0 || split.score > best.score ||
                                 (split.score == best.score && split.feature < best.feature))) {
        best = split;
      }
    }
    if (best.feature < 0) return index;

    const auto feature = static_cast<std::size_t>(best.feature);
    std::vector<std::vector<Sample>> parts(
        best.categorical ? data_.features[feature].categories.size() : 2);
    for (const auto& s : samples) {
      const double v = data_.rows[s.row][feature];
      parts[best.categorical ? static_cast<std::size_t>(v) : (v <= best.threshold ? 0 : 1)].push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();

    nodes_[index].feature = best.feature;
    nodes_[index].categorical = best.categorical;
    nodes_[index].threshold = best.threshold;
    std::vector<std::size_t> children;
    for (auto& part : parts) {
      if (part.empty()) {
        const std::size_t leaf = nodes_.size();
        nodes_.emplace_back();
        nodes_[leaf].label = nodes_[index].label;
        children.push_back(leaf);
      } else {
        children.push_back(grow(std::move(part), depth + 1));
      }
    }
    nodes_[index].children = std::move(children);
    return index;
  }

  std::vector<std::size_t> candidates() {
    if (params_.mtry == 0 || params_.mtry >= features_.size()) return features_;
    if (rng_ == nullptr) throw ParameterError("feature subsampling needs a random engine");
    std::vector<std::size_t> pool = features_;
    // Partial Fisher-Yates: the first mtry slots become the draw.
    for (std::size_t i = 0; i < params_.mtry; ++i) {
      std::swap(pool[i], pool[i + uniform_index(*rng_, pool.size() - i)]);
    }
    pool.resize(params_.mtry);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  double score(double gain, double split_info) const {
    if (!params_.use_gain_ratio) return gain;
    return split_info > 0.0 ? gain / split_info : 0.0;
  }

  Split numeric_split(const std::vector<Sample>& samples, std::size_t f, double parent_entropy,
                      double total) const {
    std::vector<Sample> sorted = samples;
    std::stable_sort(sorted.begin(), sorted.end(), [&](const Sample& a, const Sample& b) {
      return data_.rows[a.row][f] < data_.rows[b.row][f];
    });
    std::vector<double> left(classes_, 0.0);
    std::vector<double> right = histogram(sorted);
    double left_weight = 0.0;
    Split best;
    double best_gain = 0.0;
    double best_info = 0.0;
    const std::size_t n = sorted.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t c = data_.labels[sorted[i].row];
      left[c] += sorted[i].weight;
      right[c] -= sorted[i].weight;
      left_weight += sorted[i].weight;
      const double v = data_.rows[sorted[i].row][f];
      const double next = data_.rows[sorted[i + 1].row][f];
      if (!(v < next)) continue;
      if (i + 1 < params_.min_leaf || n - i - 1 < params_.min_leaf) continue;
      const double right_weight = total - left_weight;
      if (left_weight <= 0.0 || right_weight <= 0.0) continue;
      const double pl = left_weight / total;
      const double pr = right_weight / total;
      const double gain = parent_entropy - pl * entropy(left) - pr * entropy(right);
      if (gain > best_gain + kMinGain || (best.feature < 0 && gain > kMinGain)) {
        best_gain = gain;
        best_info = -(pl * std::log2(pl) + pr * std::log2(pr));
        best.feature = static_cast<int>(f);
        best.threshold = v + (next - v) / 2.0;
      }
    }
    if (best.feature >= 0) best.score = score(best_gain, best_info);
    return best;
  }

  Split categorical_split(const std::vector<Sample>& samples, std::size_t f, double parent_entropy,
                          double total) const {
    const std::size_t arity = data_.features[f].categories.size();
    std::vector<std::vector<double>> counts(arity, std::vector<double>(classes_, 0.0));
    std::vector<double> weight(arity, 0.0);
    std::vector<std::size_t> sizes(arity, 0);
    for (const auto& s : samples) {
      const auto v = static_cast<std::size_t>(data_.rows[s.row][f]);
      counts[v][data_.labels[s.row]] += s.weight;
      weight[v] += s.weight;
      ++sizes[v];
    }
    const auto large = std::count_if(sizes.begin(), sizes.end(),
                                     [&](std::size_t size) { return size >= params_.min_leaf; });
    Split split;
    if (large < 2) return split;
    double conditional = 0.0;
    double split_info = 0.0;
    for (std::size_t v = 0; v < arity; ++v) {
      if (weight[v] <= 0.0) continue;
      const double p = weight[v] / total;
      conditional += p * entropy(counts[v]);
      split_info -= p * std::log2(p);
    }
    const double gain = parent_entropy - conditional;
    if (gain <= kMinGain) return split;
    split.feature = static_cast<int>(f);
    split.categorical = true;
    split.score = score(gain, split_info);
    return split;
  }

  const Dataset& data_;
  const TreeParams& params_;
  Rng* rng_;
  std::size_t classes_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

double entropy(std::span<const double> class_weights) {
  const double total = std::accumulate(class_weights.begin(), class_weights.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double w : class_weights) {
    if (w <= 0.0) continue;
    const double p = w / total;
    h -= p * std::log2(p);
  }
  return h;
}

std::size_t DecisionTree::predict(std::span<const double> row) const {
  std::size_t index = 0;
  while (true) {
    const TreeNode& node = nodes_[index];
    if (node.feature < 0) return node.label;
    const double v = row[static_cast<std::size_t>(node.feature)];
    if (node.categorical) {
      const auto category = static_cast<std::size_t>(v);
      if (v < 0 || category >= node.children.size()) return node.label;
      index = node.children[category];
    } else {
      index = node.children[v <= node.threshold ? 0 : 1];
    }
  }
}

std::size_t DecisionTree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [index, depth] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, depth);
    for (std::size_t child : nodes_[index].children) stack.push_back({child, depth + 1});
  }
  return deepest;
}

std::vector<std::size_t> DecisionTree::used_features() const {
  std::vector<std::size_t> used;
  for (const auto& node : nodes_) {
    if (node.feature >= 0) used.push_back(static_cast<std::size_t>(node.feature));
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  return used;
}

DecisionTree DecisionTree::from_nodes(std::vector<TreeNode> nodes) {
  if (nodes.empty()) throw IntegrityError("a tree needs at least one node");
  for (const auto& node : nodes) {
    for (std::size_t child : node.children) {
      if (child >= nodes.size()) throw IntegrityError("tree node refers to a missing child");
    }
    if (node.feature >= 0 && node.children.empty()) throw IntegrityError("split node without children");
  }
  DecisionTree tree;
  tree.nodes_ = std::move(nodes);
  return tree;
}

DecisionTree DecisionTree::fit(const Dataset& data, std::span<const std::size_t> rows,
                               std::span<const double> weights, std::span<const std::size_t> features,
                               const TreeParams& params, Rng* rng) {
  if (rows.empty()) throw ParameterError("cannot fit a tree on zero rows");
  if (!weights.empty() && weights.size() != rows.size()) {
    throw ParameterError("sample weights must parallel the training rows");
  }
  if (params.min_leaf == 0) throw ParameterError("min_leaf must be positive");
  for (std::size_t f : features) {
    if (f >= data.feature_count()) throw ParameterError("active feature index out of range");
  }
  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= data.size()) throw ParameterError("training row index out of range");
    samples.push_back({rows[i], weights.empty() ? 1.0 : weights[i]});
  }
  DecisionTree tree;
  tree.nodes_ = Builder(data, params, rng).run(std::move(samples), features);
  return tree;
}

}  // namespace evochain::learn
