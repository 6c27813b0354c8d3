#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

/// Labelled feature matrix shared by chain assembly and the learners.
namespace evochain {

enum class FeatureKind { numeric, categorical };

struct FeatureInfo {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  /// Number of frames between the feature's state and the focal state
  /// (0 for the focal state itself).
  std::size_t age = 0;
  /// Category labels; a categorical value is stored as an index into them.
  std::vector<std::string> categories;

  bool operator==(const FeatureInfo&) const = default;
};

struct Dataset {
  std::vector<FeatureInfo> features;
  /// Sorted class labels; `labels` holds indices into this list.
  std::vector<std::string> classes;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;

  std::size_t size() const { return rows.size(); }
  std::size_t feature_count() const { return features.size(); }
  std::size_t numeric_count() const;
  std::size_t categorical_count() const;

  /// Throws IntegrityError on ragged rows, non-finite values, out-of-range
  /// categories or labels.
  void validate() const;

  /// Hash of feature names, kinds, categories and classes.
  std::string fingerprint() const;

  bool operator==(const Dataset&) const = default;
};

/// Per-column min-max scaling of numeric features into [0, 1]. Constant
/// columns map to 0; categorical columns pass through.
class MinMaxScaler {
 public:
  /// Fits on the given rows only (all rows when empty).
  void fit(const Dataset& data, std::span<const std::size_t> rows = {});
  void transform(std::vector<double>& row) const;
  void transform(Dataset& data) const;

  const std::vector<double>& minimum() const { return min_; }
  const std::vector<double>& maximum() const { return max_; }

 private:
  std::vector<bool> numeric_;
  std::vector<double> min_;
  std::vector<double> max_;
};

/// Scaler fitted on the whole dataset and applied to it.
Dataset normalize(const Dataset& data);

/// CSV with the feature names as header and a final `target` column;
/// categorical values and targets are quoted.
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// JSON sidecar describing features and classes.
void write_schema(std::ostream& out, const Dataset& data);

/// Reads a CSV written by write_dataset_csv with its schema sidecar.
Dataset read_dataset(std::istream& csv, std::istream& schema);

}  // namespace evochain
