#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evochain/chains.hpp"
#include "evochain/ged.hpp"
#include "evochain/learn/model.hpp"
#include "evochain/sgci.hpp"
#include "evochain/synth.hpp"

/// End-to-end orchestration: slice, detect, track, chains, featurize,
/// evaluate, select and report, each reading the previous stage's files.
namespace evochain::pipeline {

struct WindowConfig {
  /// Defaults to the first and one past the last timestamp of the input.
  std::optional<std::int64_t> span_start;
  std::optional<std::int64_t> span_end;
  std::int64_t length = 0;
  /// 0 means disjoint frames (step = length).
  std::int64_t step = 0;
};

struct SynthConfig {
  bool enabled = false;
  /// Scenario script file, or inline JSON text when `scenario_text` is set.
  std::string scenario_path;
  std::string scenario_text;
  std::optional<synth::HistoryOptions> history;
  std::uint64_t seed = 1;
  std::int64_t window_length = 100;
  /// Use the planted memberships instead of clique percolation.
  bool bypass_detection = false;
};

struct SelectionConfig {
  bool enabled = false;
  double epsilon = 0.0;
  /// Chain lengths to run elimination on; all configured lengths when empty.
  std::vector<std::size_t> chain_lengths;
};

struct PipelineConfig {
  std::string input;
  SynthConfig synth;
  WindowConfig window;
  bool directed = true;
  int cpm_k = 3;
  std::size_t max_cliques = 2'000'000;
  chains::Method method = chains::Method::ged;
  std::vector<ged::Thresholds> ged_thresholds{ged::Thresholds{}};
  sgci::Parameters sgci;
  double social_position_epsilon = 0.9;
  double cohesion_cap = 1e6;
  std::vector<std::size_t> chain_lengths{2, 3, 4, 5};
  double chain_sample_fraction = 1.0;
  std::vector<learn::ModelParams> classifiers;
  std::size_t cv_folds = 10;
  bool global_normalization = false;
  std::uint64_t seed = 1;
  SelectionConfig selection;
  std::string output_dir = "evochain-out";

  PipelineConfig();

  /// Throws ConfigError for unknown keys or invalid values. Relative input
  /// and scenario paths are resolved against `base_dir`.
  static PipelineConfig from_json(std::string_view text, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);
  /// Every setting, defaults included, as pretty-printed JSON.
  std::string to_json() const;
  void validate() const;
};

struct RunOptions {
  bool allow_stale = false;
  std::size_t threads = 1;
};

/// Worker count from EVOCHAIN_THREADS (default 1). Throws ConfigError on a
/// value that is not a positive integer.
std::size_t threads_from_env();

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception by index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Writes via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

class Pipeline {
 public:
  Pipeline(PipelineConfig config, RunOptions options);

  void slice();
  void detect();
  void track();
  void chains();
  void featurize();
  void evaluate();
  void select();
  void report();
  void run_all();

  /// Hash of the configuration seen by a stage and everything upstream of
  /// it. `cell` names a sweep cell for the per-cell stages.
  std::string stage_hash(std::string_view stage, std::string_view cell = {}) const;

  /// Directory names of the tracking sweep cells, e.g. "ged_a50_b50".
  std::vector<std::string> track_cells() const;
  /// Directory names of the classifiers, e.g. "forest".
  std::vector<std::string> classifier_cells() const;

  const PipelineConfig& config() const { return config_; }

 private:
  std::filesystem::path dir(std::string_view stage) const;
  std::string header(std::string_view stage, std::string_view cell, std::string_view upstream) const;
  std::string read_checked(const std::filesystem::path& path, const std::string& expected_hash) const;

  PipelineConfig config_;
  RunOptions options_;
};

/// Per-class F-measure table over every evaluation report under
/// `output_dir`: CSV rows (track_cell, classifier, chain_length, class,
/// precision, recall, f, macro_f).
struct ReportRow {
  std::string track_cell;
  std::string classifier;
  std::size_t chain_length = 0;
  std::string event;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  double macro_f = 0.0;
};

std::string report_csv(const std::vector<ReportRow>& rows);
/// Line chart of F-measure against chain length, one panel per track cell
/// and classifier, one line per event class.
std::string report_svg(const std::vector<ReportRow>& rows);

}  // namespace evochain::pipeline
